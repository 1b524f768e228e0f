#include "fk/sparse_operator.hpp"

#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "fk/error.hpp"
#include "fk/field_io.hpp"
#include "fk/pde.hpp"

namespace fk {

Field SparseOperator::apply(const Field& u) const {
    if (!(u.grid() == grid) || u.components() != 1)
        throw InvalidArgument("operator applied to a field on a different grid");
    Field out(grid);
    const auto v = u.values();
    const auto n = static_cast<long long>(rows());
#pragma omp parallel for schedule(static)
    for (long long rr = 0; rr < n; ++rr) {
        const auto r = static_cast<std::size_t>(rr);
        double acc = 0.0;
        for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) acc += weight[k] * v[col[k]];
        out[r] = acc + forcing[r];
    }
    return out;
}

void write_operator(std::ostream& os, const SparseOperator& op) {
    const nlohmann::json h = {{"format", "FKW1"}, {"rows", op.rows()}, {"cols", op.cols()},
                              {"nnz", op.nnz()},  {"dt", op.dt},       {"pde", op.pde}};
    os << h.dump() << '\n';
    for (std::size_t r = 0; r < op.rows(); ++r) {
        const auto row = static_cast<std::uint32_t>(r);
        for (std::size_t k = op.row_ptr[r]; k < op.row_ptr[r + 1]; ++k) {
            char rec[16];
            std::memcpy(rec, &row, 4);
            std::memcpy(rec + 4, &op.col[k], 4);
            std::memcpy(rec + 8, &op.weight[k], 8);
            os.write(rec, sizeof rec);
        }
    }
    write_f64(os, op.forcing.data(), op.forcing.size());
    if (!os) throw Error("operator write failed");
}

SparseOperator read_operator(std::istream& is, std::optional<double> expected_dt,
                             const nlohmann::json* expected_pde) {
    std::string line;
    if (!std::getline(is, line)) throw FormatError("missing FKW1 header");
    nlohmann::json h;
    try {
        h = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("FKW1 header is not JSON: ") + e.what());
    }
    SparseOperator op;
    std::size_t rows = 0, cols = 0, nnz = 0;
    try {
        if (h.value("format", std::string("FKW1")) != "FKW1") throw FormatError("not an FKW1 file");
        rows = h.at("rows").get<std::size_t>();
        cols = h.at("cols").get<std::size_t>();
        nnz = h.at("nnz").get<std::size_t>();
        op.dt = h.at("dt").get<double>();
        op.pde = h.at("pde");
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("bad FKW1 header: ") + e.what());
    }
    if (expected_dt && *expected_dt != op.dt)
        throw FormatError("operator dt " + std::to_string(op.dt) + " does not match expected " +
                          std::to_string(*expected_dt));
    if (expected_pde && *expected_pde != op.pde)
        throw FormatError("operator pde descriptor does not match the expected one");
    op.grid = pde_from_json(op.pde).grid;
    if (rows != op.grid.size() || cols != op.grid.size())
        throw FormatError("operator shape does not match its pde grid");

    op.col.resize(nnz);
    op.weight.resize(nnz);
    op.row_ptr.assign(rows + 1, 0);
    std::uint32_t prev = 0;
    for (std::size_t k = 0; k < nnz; ++k) {
        char rec[16];
        is.read(rec, sizeof rec);
        if (is.gcount() != sizeof rec) throw FormatError("truncated FKW1 triples");
        std::uint32_t row = 0;
        std::memcpy(&row, rec, 4);
        std::memcpy(&op.col[k], rec + 4, 4);
        std::memcpy(&op.weight[k], rec + 8, 8);
        if (row >= rows || row < prev || op.col[k] >= cols)
            throw FormatError("FKW1 triples out of range or not sorted by row");
        prev = row;
        op.row_ptr[row + 1] += 1;
    }
    for (std::size_t r = 0; r < rows; ++r) op.row_ptr[r + 1] += op.row_ptr[r];
    op.forcing.resize(rows);
    read_f64(is, op.forcing.data(), rows);
    return op;
}

void save_operator(const std::string& path, const SparseOperator& op) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot open " + path + " for writing");
    write_operator(os, op);
}

SparseOperator load_operator(const std::string& path, std::optional<double> expected_dt,
                             const nlohmann::json* expected_pde) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cannot open " + path);
    return read_operator(is, expected_dt, expected_pde);
}

}  // namespace fk
