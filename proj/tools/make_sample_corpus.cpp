// Writes the bundled synthetic corpus: plain-text files of paragraphs with a
// zipf-ish content vocabulary, mostly inside the 50..200 word band plus a few
// deliberate outliers so the length filter has something to reject.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "teg/util/rng.hpp"

namespace fs = std::filesystem;

namespace {

std::vector<std::string> make_words(size_t count, teg::rng::Stream& rng) {
    const std::vector<std::string> syllables = {
        "ra", "ve",  "mo", "ta",  "lin", "dor", "sa",  "ne",  "ku",  "pi",
        "zen", "lo", "mar", "ti", "bel", "no",  "ga",  "ri",  "sun", "fe",
        "cor", "da", "hel", "vi", "pol", "qua", "ser", "tum", "wex", "yal"};
    std::vector<std::string> words;
    while (words.size() < count) {
        size_t n = 2 + rng.next_below(2);
        std::string w;
        for (size_t i = 0; i < n; ++i) w += syllables[rng.next_below(syllables.size())];
        if (std::find(words.begin(), words.end(), w) == words.end()) words.push_back(w);
    }
    return words;
}

// zipf-like: rank r sampled with weight 1/(r+2)
size_t zipf_pick(size_t n, teg::rng::Stream& rng) {
    static std::vector<double> cdf;
    if (cdf.size() != n) {
        cdf.assign(n, 0.0);
        double acc = 0;
        for (size_t r = 0; r < n; ++r) {
            acc += 1.0 / (double)(r + 2);
            cdf[r] = acc;
        }
        for (auto& x : cdf) x /= acc;
    }
    double u = rng.next_double();
    for (size_t r = 0; r < n; ++r)
        if (u <= cdf[r]) return r;
    return n - 1;
}

std::string make_paragraph(const std::vector<std::string>& words, int target_words,
                           teg::rng::Stream& rng) {
    const std::vector<std::string> fillers = {"the", "a",  "of",   "to", "and", "in",  "is",
                                              "was", "on", "that", "as", "by",  "with"};
    std::vector<std::string> theme;
    while (theme.size() < 5) {
        const auto& w = words[zipf_pick(words.size(), rng)];
        if (std::find(theme.begin(), theme.end(), w) == theme.end()) theme.push_back(w);
    }
    std::string para;
    int written = 0;
    while (written < target_words) {
        size_t len = 8 + rng.next_below(8);
        std::string sentence;
        for (size_t i = 0; i < len; ++i) {
            std::string w;
            double u = rng.next_double();
            if (u < 0.45)
                w = theme[rng.next_below(theme.size())];
            else if (u < 0.70)
                w = fillers[rng.next_below(fillers.size())];
            else
                w = words[zipf_pick(words.size(), rng)];
            if (i == 0) w[0] = (char)std::toupper((unsigned char)w[0]);
            if (i) sentence += ' ';
            sentence += w;
            ++written;
        }
        sentence += ". ";
        para += sentence;
    }
    if (!para.empty() && para.back() == ' ') para.pop_back();
    return para;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"synthetic corpus writer"};
    std::string out_dir = "data/sample_corpus";
    int paragraphs = 1000, files = 20;
    uint64_t seed = 42;
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--paragraphs", paragraphs, "paragraph count");
    app.add_option("--files", files, "file count");
    app.add_option("--seed", seed, "generator seed");
    CLI11_PARSE(app, argc, argv);

    teg::rng::Stream rng(seed);
    auto words = make_words(160, rng);

    std::vector<std::string> docs((size_t)files);
    for (int p = 0; p < paragraphs; ++p) {
        int target;
        double u = rng.next_double();
        if (u < 0.03)
            target = 10 + (int)rng.next_below(36); // below the filter band
        else if (u < 0.06)
            target = 205 + (int)rng.next_below(56); // above the filter band
        else
            target = 60 + (int)rng.next_below(131);
        auto& doc = docs[(size_t)(p % files)];
        if (!doc.empty()) doc += "\n";
        doc += make_paragraph(words, target, rng) + "\n";
    }

    fs::create_directories(out_dir);
    for (int f = 0; f < files; ++f) {
        char name[32];
        std::snprintf(name, sizeof name, "doc_%02d.txt", f);
        std::ofstream out(fs::path(out_dir) / name, std::ios::binary);
        out << docs[(size_t)f];
    }
    std::cout << "wrote " << paragraphs << " paragraphs across " << files << " files to "
              << out_dir << "\n";
    return 0;
}
