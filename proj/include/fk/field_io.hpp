#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "fk/grid.hpp"

namespace fk {

// FKF1 field files: one JSON header line
//   {"format":"FKF1","dim":..,"resolution":[..],"extent":[..],"boundary":"..",
//    "components":..,"count":..}
// followed by `count` frames of little-endian f64 samples, row-major.

nlohmann::json grid_to_json(const Grid& grid);
Grid grid_from_json(const nlohmann::json& j);

void write_fields(std::ostream& os, const std::vector<Field>& frames);
std::vector<Field> read_fields(std::istream& is);

void save_fields(const std::string& path, const std::vector<Field>& frames);
std::vector<Field> load_fields(const std::string& path);

// Raw little-endian f64 helpers shared with the operator and frame codecs.
void write_f64(std::ostream& os, const double* data, std::size_t count);
void read_f64(std::istream& is, double* data, std::size_t count);

}  // namespace fk
