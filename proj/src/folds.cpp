#include "driveml/folds.hpp"

#include "driveml/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace driveml {

std::vector<int> stratified_folds(std::span<const int> labels, int k, std::uint64_t seed) {
    if (k < 2) throw std::invalid_argument("folds: need at least 2 folds");
    std::vector<int> fold(labels.size(), 0);
    Rng rng(derive_seed(seed, {hash_tag("folds")}));
    std::size_t offset = 0;  // continue dealing where the previous class stopped
    for (int c = 0; c < 2; ++c) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] == c) idx.push_back(i);
        }
        rng.shuffle(idx);
        for (std::size_t j = 0; j < idx.size(); ++j) {
            fold[idx[j]] = static_cast<int>((offset + j) % static_cast<std::size_t>(k));
        }
        offset += idx.size();
    }
    return fold;
}

std::vector<std::size_t> stratified_subsample(std::span<const int> labels, std::size_t size, std::uint64_t seed) {
    const std::size_t n = labels.size();
    if (size >= n) {
        std::vector<std::size_t> all(n);
        for (std::size_t i = 0; i < n; ++i) all[i] = i;
        return all;
    }
    std::vector<std::size_t> by_class[2];
    for (std::size_t i = 0; i < n; ++i) by_class[labels[i] == 1 ? 1 : 0].push_back(i);

    std::size_t take[2];
    double remainder[2];
    for (int c = 0; c < 2; ++c) {
        const double exact = static_cast<double>(by_class[c].size()) * static_cast<double>(size) / static_cast<double>(n);
        take[c] = static_cast<std::size_t>(std::floor(exact));
        remainder[c] = exact - static_cast<double>(take[c]);
    }
    while (take[0] + take[1] < size) {
        const int c = remainder[1] > remainder[0] ? 1 : 0;
        ++take[c];
        remainder[c] = -1.0;
    }

    Rng rng(derive_seed(seed, {hash_tag("subsample")}));
    std::vector<std::size_t> out;
    for (int c = 0; c < 2; ++c) {
        rng.shuffle(by_class[c]);
        out.insert(out.end(), by_class[c].begin(), by_class[c].begin() + static_cast<std::ptrdiff_t>(take[c]));
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace driveml
