#include "driveml/matrix.hpp"

#include "driveml/error.hpp"
#include "driveml/table.hpp"

#include <algorithm>

namespace driveml {

FeatureMatrix::FeatureMatrix(std::size_t rows, std::vector<std::string> names)
    : rows_(rows), names_(std::move(names)), data_(rows_ * names_.size(), 0.0) {}

std::optional<std::size_t> FeatureMatrix::find(std::string_view name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - names_.begin());
}

FeatureMatrix FeatureMatrix::take_rows(std::span<const std::size_t> rows) const {
    FeatureMatrix out(rows.size(), names_);
    for (std::size_t j = 0; j < cols(); ++j) {
        auto src = column(j);
        auto dst = out.column(j);
        for (std::size_t i = 0; i < rows.size(); ++i) dst[i] = src[rows[i]];
    }
    return out;
}

FeatureMatrix FeatureMatrix::select(const std::vector<std::string>& names) const {
    FeatureMatrix out(rows_, names);
    for (std::size_t j = 0; j < names.size(); ++j) {
        auto src = find(names[j]);
        if (!src) throw DataError("matrix: missing feature column '" + names[j] + "'");
        auto from = column(*src);
        std::copy(from.begin(), from.end(), out.column(j).begin());
    }
    return out;
}

FeatureMatrix FeatureMatrix::from_table(const Table& t, const std::vector<std::string>& names) {
    FeatureMatrix out(t.n_rows(), names);
    for (std::size_t j = 0; j < names.size(); ++j) {
        const Column& c = t.column(names[j]);
        if (c.is_categorical()) {
            throw DataError("matrix: column '" + c.name + "' is categorical; encode it before modeling");
        }
        if (c.missing_count() != 0) throw DataError("matrix: column '" + c.name + "' has missing cells");
        std::copy(c.values.begin(), c.values.end(), out.column(j).begin());
    }
    return out;
}

}  // namespace driveml
