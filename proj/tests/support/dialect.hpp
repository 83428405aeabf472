#pragma once

#include <algorithm>
#include <cctype>
#include <random>
#include <string>
#include <vector>

namespace dialect {

inline const char* kWords[] = {"reef", "coral", "Heron", "Island", "survey", "2021", "north", "site", "B7", "(12.5)",
                        "pdam.png", "./data/", "Jul27", "colony", "x-ray", "depth:4m"};

inline std::string word(std::mt19937& rng) { return kWords[std::uniform_int_distribution<std::size_t>(0, 15)(rng)]; }

inline std::string phrase(std::mt19937& rng, int max_words) {
    int n = std::uniform_int_distribution<int>(1, max_words)(rng);
    std::string out;
    for (int i = 0; i < n; ++i) out += (i ? " " : "") + word(rng);
    return out;
}

struct Rendered {
    std::string v1, v2;
    void both(const std::string& s) { v1 += s; v2 += s; }
};

/// One random document rendered in both macro dialects.
inline Rendered generate(std::mt19937& rng) {
    Rendered r;
    std::vector<std::string> names;
    auto invoke = [&](bool braced) {
        const auto& name = names[std::uniform_int_distribution<std::size_t>(0, names.size() - 1)(rng)];
        if (braced) {
            r.v1 += "{`@" + name + "}";
            r.v2 += "{<@" + name + "}";
        } else {
            r.v1 += "`@" + name + " ";
            r.v2 += "<@" + name + " ";
        }
    };
    auto text_with_macros = [&](int pieces) {
        for (int i = 0; i < pieces; ++i) {
            if (!names.empty() && std::bernoulli_distribution(0.4)(rng)) invoke(std::bernoulli_distribution(0.5)(rng));
            else r.both(phrase(rng, 3) + " ");
        }
        r.both("end");
    };

    int n_macros = std::uniform_int_distribution<int>(1, 5)(rng);
    for (int m = 0; m < n_macros; ++m) {
        std::string name = "M" + std::to_string(m) + word(rng).substr(0, 1) + "x";
        name.erase(std::remove_if(name.begin(), name.end(), [](char c) { return !std::isalnum(static_cast<unsigned char>(c)); }),
                   name.end());
        r.v1 += "`@" + name + " ";
        r.v2 += ">@" + name + " ";
        text_with_macros(std::uniform_int_distribution<int>(1, 3)(rng));
        r.both("\n");
        int extra = std::uniform_int_distribution<int>(0, 2)(rng);
        for (int k = 0; k < extra; ++k) r.both(phrase(rng, 4) + "\n");
        names.push_back(name);
        if (std::bernoulli_distribution(0.5)(rng)) r.both("\n");
    }
    r.both("\n");

    int n_blocks = std::uniform_int_distribution<int>(1, 4)(rng);
    for (int b = 0; b < n_blocks; ++b) {
        r.both("@Note Block" + std::to_string(b) + " ");
        text_with_macros(2);
        r.both("\n");
        int n_minors = std::uniform_int_distribution<int>(0, 3)(rng);
        for (int k = 0; k < n_minors; ++k) {
            r.both("@Note-Detail ");
            text_with_macros(std::uniform_int_distribution<int>(1, 3)(rng));
            r.both("\n");
            if (std::bernoulli_distribution(0.3)(rng)) {
                r.both("continued ");
                text_with_macros(1);
                r.both("\n");
            }
        }
        r.both("\n");
    }
    return r;
}

}  // namespace dialect
