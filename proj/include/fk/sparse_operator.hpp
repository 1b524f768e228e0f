#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fk/grid.hpp"

namespace fk {

/// One propagation step of a linear problem as out = W u + g (CSR storage).
struct SparseOperator {
    Grid grid;
    double dt = 0.0;
    nlohmann::json pde;  // descriptor the operator was assembled from
    std::vector<std::size_t> row_ptr{0};
    std::vector<std::uint32_t> col;
    std::vector<double> weight;
    std::vector<double> forcing;

    std::size_t rows() const { return row_ptr.size() - 1; }
    std::size_t cols() const { return grid.size(); }
    std::size_t nnz() const { return weight.size(); }
    std::size_t row_nnz(std::size_t r) const { return row_ptr[r + 1] - row_ptr[r]; }

    Field apply(const Field& u) const;
};

// FKW1: JSON header {"format":"FKW1","rows","cols","nnz","dt","pde"}, newline,
// nnz records of (u32 row, u32 col, f64 weight), then `rows` f64 forcing values.
void write_operator(std::ostream& os, const SparseOperator& op);
/// Rejects the file when `expected_dt` / `expected_pde` are given and differ.
SparseOperator read_operator(std::istream& is, std::optional<double> expected_dt = std::nullopt,
                             const nlohmann::json* expected_pde = nullptr);

void save_operator(const std::string& path, const SparseOperator& op);
SparseOperator load_operator(const std::string& path, std::optional<double> expected_dt = std::nullopt,
                             const nlohmann::json* expected_pde = nullptr);

}  // namespace fk
