#include "fk/field_io.hpp"

#include <bit>
#include <fstream>
#include <istream>
#include <ostream>

#include "fk/error.hpp"

static_assert(std::endian::native == std::endian::little,
              "field codecs assume a little-endian host");

namespace fk {

nlohmann::json grid_to_json(const Grid& grid) {
    nlohmann::json res = nlohmann::json::array();
    nlohmann::json ext = nlohmann::json::array();
    for (int a = 0; a < grid.dim(); ++a) {
        res.push_back(grid.resolution(a));
        ext.push_back(grid.extent(a));
    }
    return {{"dim", grid.dim()},
            {"resolution", res},
            {"extent", ext},
            {"boundary", std::string(to_string(grid.boundary()))}};
}

Grid grid_from_json(const nlohmann::json& j) {
    try {
        const int dim = j.at("dim").get<int>();
        const auto& res = j.at("resolution");
        const auto& ext = j.at("extent");
        if (dim < 1 || dim > 2 || res.size() != static_cast<std::size_t>(dim) ||
            ext.size() != static_cast<std::size_t>(dim))
            throw FormatError("grid header has inconsistent dimensions");
        std::array<int, 2> r{1, 1};
        std::array<double, 2> e{1.0, 1.0};
        for (int a = 0; a < dim; ++a) {
            r[a] = res.at(a).get<int>();
            e[a] = ext.at(a).get<double>();
        }
        return Grid(dim, r, e, parse_boundary(j.at("boundary").get<std::string>()));
    } catch (const nlohmann::json::exception& ex) {
        throw FormatError(std::string("bad grid header: ") + ex.what());
    } catch (const InvalidArgument& ex) {
        throw FormatError(std::string("bad grid header: ") + ex.what());
    }
}

void write_f64(std::ostream& os, const double* data, std::size_t count) {
    os.write(reinterpret_cast<const char*>(data),
             static_cast<std::streamsize>(count * sizeof(double)));
}

void read_f64(std::istream& is, double* data, std::size_t count) {
    is.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(count * sizeof(double)));
    if (static_cast<std::size_t>(is.gcount()) != count * sizeof(double))
        throw FormatError("unexpected end of f64 payload");
}

void write_fields(std::ostream& os, const std::vector<Field>& frames) {
    if (frames.empty()) throw InvalidArgument("no frames to write");
    const Grid& g = frames.front().grid();
    const int comps = frames.front().components();
    for (const auto& f : frames)
        if (!(f.grid() == g) || f.components() != comps)
            throw InvalidArgument("frames in one FKF1 file must share grid and components");
    nlohmann::json h = grid_to_json(g);
    h["format"] = "FKF1";
    h["components"] = comps;
    h["count"] = frames.size();
    os << h.dump() << '\n';
    for (const auto& f : frames) write_f64(os, f.values().data(), f.values().size());
    if (!os) throw Error("write failed");
}

std::vector<Field> read_fields(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw FormatError("missing FKF1 header");
    nlohmann::json h;
    try {
        h = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& ex) {
        throw FormatError(std::string("FKF1 header is not JSON: ") + ex.what());
    }
    if (h.contains("format") && h["format"] != "FKF1") throw FormatError("not an FKF1 file");
    const Grid g = grid_from_json(h);
    int comps = 0;
    std::size_t count = 0;
    try {
        comps = h.at("components").get<int>();
        count = h.at("count").get<std::size_t>();
    } catch (const nlohmann::json::exception& ex) {
        throw FormatError(std::string("bad FKF1 header: ") + ex.what());
    }
    if (comps < 1) throw FormatError("FKF1 components must be positive");
    std::vector<Field> frames;
    frames.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        Field f(g, comps);
        read_f64(is, f.values().data(), f.values().size());
        frames.push_back(std::move(f));
    }
    return frames;
}

void save_fields(const std::string& path, const std::vector<Field>& frames) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot open " + path + " for writing");
    write_fields(os, frames);
}

std::vector<Field> load_fields(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cannot open " + path);
    return read_fields(is);
}

}  // namespace fk
