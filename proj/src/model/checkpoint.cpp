#include "teg/model/checkpoint.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "teg/util/errors.hpp"
#include "teg/util/fnv.hpp"

namespace teg::model {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json config_to_json(const ModelConfig& c) {
    return json{{"vocab_size", c.vocab_size}, {"d_model", c.d_model},
                {"n_heads", c.n_heads},       {"enc_layers", c.enc_layers},
                {"dec_layers", c.dec_layers}, {"d_ff", c.d_ff},
                {"max_len", c.max_len},       {"phi", c.phi},
                {"prefix_len", c.prefix_len}, {"n_max", c.n_max}};
}

ModelConfig config_from_json(const json& j) {
    ModelConfig c;
    c.vocab_size = j.at("vocab_size").get<int>();
    c.d_model = j.at("d_model").get<int>();
    c.n_heads = j.at("n_heads").get<int>();
    c.enc_layers = j.at("enc_layers").get<int>();
    c.dec_layers = j.at("dec_layers").get<int>();
    c.d_ff = j.at("d_ff").get<int>();
    c.max_len = j.at("max_len").get<int>();
    c.phi = j.at("phi").get<double>();
    c.prefix_len = j.at("prefix_len").get<int>();
    c.n_max = j.at("n_max").get<int>();
    return c;
}

void append_f32(std::vector<char>& buf, const std::vector<double>& values) {
    size_t at = buf.size();
    buf.resize(at + values.size() * sizeof(float));
    for (double v : values) {
        float f = (float)v;
        std::memcpy(buf.data() + at, &f, sizeof(float));
        at += sizeof(float);
    }
}

}  // namespace

std::string config_hash(const ModelConfig& cfg) {
    return util::fnv_hex(util::fnv1a64(config_to_json(cfg).dump()));
}

void save_checkpoint(const std::string& dir, const TegModel& model, const text::Vocab& vocab,
                     Mode mode, const OptimizerState* opt) {
    fs::create_directories(dir);

    json tensors = json::array();
    std::vector<char> payload;
    size_t offset = 0;
    auto add = [&](const std::string& name, const std::vector<int>& shape,
                   const std::vector<double>& values) {
        tensors.push_back(json{{"name", name},
                               {"shape", shape},
                               {"dtype", "f32"},
                               {"offset", offset},
                               {"count", values.size()}});
        append_f32(payload, values);
        offset += values.size() * sizeof(float);
    };

    for (auto& [name, t] : model.named_params()) add(name, t->shape, t->data);
    if (opt) {
        for (auto& [name, m, v] : opt->moments) {
            add("opt.m." + name, {(int)m.size()}, m);
            add("opt.v." + name, {(int)v.size()}, v);
        }
    }

    json manifest{{"format_version", 1},
                  {"mode", mode_name(mode)},
                  {"config", config_to_json(model.cfg)},
                  {"config_hash", config_hash(model.cfg)},
                  {"vocab_hash", util::fnv_hex(vocab.hash())},
                  {"tensors", tensors},
                  {"opt", json{{"present", opt != nullptr}, {"step", opt ? opt->step : 0}}}};

    {
        std::ofstream f(dir + "/manifest.json", std::ios::binary);
        if (!f) throw DataError("cannot write " + dir + "/manifest.json");
        f << manifest.dump(2) << '\n';
    }
    {
        std::ofstream f(dir + "/params.bin", std::ios::binary);
        if (!f) throw DataError("cannot write " + dir + "/params.bin");
        f.write(payload.data(), (std::streamsize)payload.size());
    }
    vocab.save(dir + "/vocab.txt");
}

LoadedCheckpoint load_checkpoint(const std::string& dir) {
    std::ifstream mf(dir + "/manifest.json", std::ios::binary);
    if (!mf) throw DataError("checkpoint manifest missing at " + dir + "/manifest.json");
    json manifest;
    try {
        mf >> manifest;
    } catch (const json::exception& e) {
        throw DataError("checkpoint manifest unreadable: " + std::string(e.what()));
    }
    if (manifest.value("format_version", 0) != 1)
        throw DataError("unsupported checkpoint format version");

    LoadedCheckpoint out{TegModel::init(config_from_json(manifest.at("config")), 0),
                         text::Vocab::load(dir + "/vocab.txt"),
                         mode_from_string(manifest.at("mode").get<std::string>()),
                         {},
                         false};

    if (manifest.at("vocab_hash").get<std::string>() != util::fnv_hex(out.vocab.hash()))
        throw DataError("checkpoint vocabulary does not match its manifest hash");
    if ((int)out.vocab.size() != out.model.cfg.vocab_size)
        throw DataError("vocabulary size disagrees with checkpoint config");

    std::ifstream pf(dir + "/params.bin", std::ios::binary);
    if (!pf) throw DataError("checkpoint payload missing at " + dir + "/params.bin");
    std::vector<char> payload((std::istreambuf_iterator<char>(pf)),
                              std::istreambuf_iterator<char>());

    auto read_values = [&](size_t offset, size_t count) {
        if (offset + count * sizeof(float) > payload.size())
            throw DataError("checkpoint payload truncated");
        std::vector<double> v(count);
        for (size_t i = 0; i < count; ++i) {
            float f;
            std::memcpy(&f, payload.data() + offset + i * sizeof(float), sizeof(float));
            v[i] = (double)f;
        }
        return v;
    };

    out.opt.step = manifest.at("opt").at("step").get<long long>();
    out.has_opt = manifest.at("opt").at("present").get<bool>();

    for (auto& tj : manifest.at("tensors")) {
        std::string name = tj.at("name").get<std::string>();
        auto values = read_values(tj.at("offset").get<size_t>(), tj.at("count").get<size_t>());
        if (name.rfind("opt.m.", 0) == 0) {
            out.opt.moments.emplace_back(name.substr(6), std::move(values),
                                         std::vector<double>{});
        } else if (name.rfind("opt.v.", 0) == 0) {
            std::string base = name.substr(6);
            bool found = false;
            for (auto& [n, m, v] : out.opt.moments) {
                if (n == base) {
                    v = std::move(values);
                    found = true;
                    break;
                }
            }
            if (!found) throw DataError("optimizer state " + name + " lacks its first moment");
        } else {
            auto p = out.model.param(name);
            if (p->numel() != values.size())
                throw DataError("tensor " + name + " size mismatch in checkpoint");
            p->data = std::move(values);
        }
    }
    return out;
}

}  // namespace teg::model
