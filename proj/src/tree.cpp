#include "driveml/tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace driveml {

double DecisionTree::predict(const FeatureMatrix& x, std::size_t row) const {
    int i = 0;
    while (nodes[static_cast<std::size_t>(i)].feature >= 0) {
        const auto& n = nodes[static_cast<std::size_t>(i)];
        i = x(row, static_cast<std::size_t>(n.feature)) < n.threshold ? n.left : n.right;
    }
    return nodes[static_cast<std::size_t>(i)].value;
}

int DecisionTree::depth() const {
    if (nodes.empty()) return 0;
    std::vector<int> d(nodes.size(), 0);
    int best = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const auto& n = nodes[i];
        if (n.feature < 0) continue;
        d[static_cast<std::size_t>(n.left)] = d[i] + 1;
        d[static_cast<std::size_t>(n.right)] = d[i] + 1;
        best = std::max(best, d[i] + 1);
    }
    return best;
}

std::size_t DecisionTree::leaves() const {
    return static_cast<std::size_t>(
        std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.feature < 0; }));
}

BinnedMatrix BinnedMatrix::build(const FeatureMatrix& x, int max_bins) {
    BinnedMatrix out;
    out.rows = x.rows();
    out.bins.resize(x.cols());
    out.thresholds.resize(x.cols());
    const std::size_t n = x.rows();

    for (std::size_t f = 0; f < x.cols(); ++f) {
        auto col = x.column(f);
        std::vector<double> sorted(col.begin(), col.end());
        std::sort(sorted.begin(), sorted.end());
        std::vector<double> distinct;
        std::vector<std::size_t> counts;
        for (double v : sorted) {
            if (distinct.empty() || v != distinct.back()) {
                distinct.push_back(v);
                counts.push_back(0);
            }
            ++counts.back();
        }

        // group[d] = bin of the d-th distinct value
        std::vector<std::uint32_t> group(distinct.size(), 0);
        if (max_bins <= 0 || distinct.size() <= static_cast<std::size_t>(max_bins)) {
            for (std::size_t d = 0; d < distinct.size(); ++d) group[d] = static_cast<std::uint32_t>(d);
        } else {
            const double per_bin = static_cast<double>(n) / static_cast<double>(max_bins);
            std::size_t cum = 0;
            std::uint32_t bin = 0;
            for (std::size_t d = 0; d < distinct.size(); ++d) {
                group[d] = bin;
                cum += counts[d];
                if (static_cast<double>(cum) >= per_bin * (bin + 1) && bin + 1 < static_cast<std::uint32_t>(max_bins) &&
                    d + 1 < distinct.size()) {
                    ++bin;
                }
            }
        }

        auto& thr = out.thresholds[f];
        for (std::size_t d = 0; d + 1 < distinct.size(); ++d) {
            if (group[d + 1] == group[d]) continue;
            double mid = distinct[d] + (distinct[d + 1] - distinct[d]) / 2.0;
            if (!(mid > distinct[d])) mid = distinct[d + 1];
            thr.push_back(mid);
        }

        auto& b = out.bins[f];
        b.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const auto d = static_cast<std::size_t>(std::lower_bound(distinct.begin(), distinct.end(), col[i]) -
                                                    distinct.begin());
            b[i] = group[d];
        }
    }
    return out;
}

namespace {

struct Frame {
    int node;
    std::size_t begin;
    std::size_t end;
    int depth;
};

struct Split {
    double gain = -std::numeric_limits<double>::infinity();
    int feature = -1;
    std::uint32_t bin = 0;
};

}  // namespace

GrownTree grow_tree(const BinnedMatrix& x, std::vector<std::size_t> rows, std::span<const double> target,
                    std::span<const double> hess, const GrowOptions& options, Rng* rng) {
    GrownTree out;
    out.gain_by_feature.assign(x.n_features(), 0.0);
    const bool newton = options.criterion == SplitCriterion::Newton;
    const double impurity_factor = newton ? 1.0 : 2.0;
    const double n_root = std::max<double>(1.0, static_cast<double>(rows.size()));
    const std::size_t p = x.n_features();
    const std::size_t min_leaf = static_cast<std::size_t>(std::max(1, options.min_leaf));
    const bool sample_features = options.mtry > 0 && static_cast<std::size_t>(options.mtry) < p;

    std::vector<std::size_t> all_features(p);
    for (std::size_t f = 0; f < p; ++f) all_features[f] = f;

    std::vector<double> hist_count;
    std::vector<double> hist_sum;

    out.tree.nodes.emplace_back();
    out.split_bin.push_back(0);
    std::vector<Frame> stack{{0, 0, rows.size(), 0}};

    while (!stack.empty()) {
        const Frame fr = stack.back();
        stack.pop_back();
        const std::size_t n = fr.end - fr.begin;

        double sum = 0.0;
        double hsum = 0.0;
        for (std::size_t r = fr.begin; r < fr.end; ++r) {
            sum += target[rows[r]];
            if (newton) hsum += hess[rows[r]];
        }
        double value = 0.0;
        if (n > 0) value = newton ? sum / std::max(hsum, 1e-12) : sum / static_cast<double>(n);
        out.tree.nodes[static_cast<std::size_t>(fr.node)].value = value * options.leaf_scale;

        const bool pure = !newton && (sum == 0.0 || sum == static_cast<double>(n));
        if (fr.depth >= options.max_depth || n < 2 * min_leaf || pure) continue;

        std::vector<std::size_t> sampled;
        const std::vector<std::size_t>* features = &all_features;
        if (sample_features) {
            sampled = rng->sample_indices(p, static_cast<std::size_t>(options.mtry));
            std::sort(sampled.begin(), sampled.end());
            features = &sampled;
        }

        const double parent_term = sum * sum / static_cast<double>(n);
        Split best;
        for (std::size_t f : *features) {
            const std::size_t nb = x.thresholds[f].size() + 1;
            if (nb < 2) continue;
            hist_count.assign(nb, 0.0);
            hist_sum.assign(nb, 0.0);
            const auto& fb = x.bins[f];
            for (std::size_t r = fr.begin; r < fr.end; ++r) {
                const std::size_t row = rows[r];
                const auto b = fb[row];
                hist_count[b] += 1.0;
                hist_sum[b] += target[row];
            }
            double cl = 0.0;
            double sl = 0.0;
            for (std::size_t k = 0; k + 1 < nb; ++k) {
                cl += hist_count[k];
                sl += hist_sum[k];
                if (cl < static_cast<double>(min_leaf)) continue;
                const double cr = static_cast<double>(n) - cl;
                if (cr < static_cast<double>(min_leaf)) break;
                if (hist_count[k] == 0.0) continue;  // same partition as an earlier threshold
                const double sr = sum - sl;
                const double gain = impurity_factor * (sl * sl / cl + sr * sr / cr - parent_term) / n_root;
                if (gain > best.gain) {
                    best.gain = gain;
                    best.feature = static_cast<int>(f);
                    best.bin = static_cast<std::uint32_t>(k);
                }
            }
        }
        if (best.feature < 0 || best.gain < options.min_gain - 1e-12) continue;

        const auto f = static_cast<std::size_t>(best.feature);
        const auto& fb = x.bins[f];
        auto mid = std::partition(rows.begin() + static_cast<std::ptrdiff_t>(fr.begin),
                                  rows.begin() + static_cast<std::ptrdiff_t>(fr.end),
                                  [&](std::size_t row) { return fb[row] <= best.bin; });
        const auto split_at = static_cast<std::size_t>(mid - rows.begin());

        const int left = static_cast<int>(out.tree.nodes.size());
        const int right = left + 1;
        out.tree.nodes.emplace_back();
        out.tree.nodes.emplace_back();
        out.split_bin.push_back(0);
        out.split_bin.push_back(0);
        auto& node = out.tree.nodes[static_cast<std::size_t>(fr.node)];
        node.feature = best.feature;
        node.threshold = x.thresholds[f][best.bin];
        node.left = left;
        node.right = right;
        out.split_bin[static_cast<std::size_t>(fr.node)] = best.bin;
        out.gain_by_feature[f] += std::max(0.0, best.gain);

        stack.push_back({right, split_at, fr.end, fr.depth + 1});
        stack.push_back({left, fr.begin, split_at, fr.depth + 1});
    }
    return out;
}

double predict_binned(const GrownTree& grown, const BinnedMatrix& x, std::size_t row) {
    const auto& nodes = grown.tree.nodes;
    std::size_t i = 0;
    while (nodes[i].feature >= 0) {
        const auto f = static_cast<std::size_t>(nodes[i].feature);
        i = static_cast<std::size_t>(x.bins[f][row] <= grown.split_bin[i] ? nodes[i].left : nodes[i].right);
    }
    return nodes[i].value;
}

}  // namespace driveml
