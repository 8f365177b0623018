#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace driveml {

class Table;

/// Dense column-major numeric matrix with named columns.
class FeatureMatrix {
public:
    FeatureMatrix() = default;
    FeatureMatrix(std::size_t rows, std::vector<std::string> names);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return names_.size(); }
    const std::vector<std::string>& names() const { return names_; }
    std::optional<std::size_t> find(std::string_view name) const;

    std::span<const double> column(std::size_t j) const { return {data_.data() + j * rows_, rows_}; }
    std::span<double> column(std::size_t j) { return {data_.data() + j * rows_, rows_}; }

    double operator()(std::size_t i, std::size_t j) const { return data_[j * rows_ + i]; }
    double& operator()(std::size_t i, std::size_t j) { return data_[j * rows_ + i]; }

    FeatureMatrix take_rows(std::span<const std::size_t> rows) const;

    /// Columns reordered/selected by name; throws when a name is absent.
    FeatureMatrix select(const std::vector<std::string>& names) const;

    /// Numeric or boolean columns of a table; missing cells are an error.
    static FeatureMatrix from_table(const Table& t, const std::vector<std::string>& names);

private:
    std::size_t rows_ = 0;
    std::vector<std::string> names_;
    std::vector<double> data_;
};

}  // namespace driveml
