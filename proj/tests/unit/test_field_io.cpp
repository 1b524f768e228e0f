#include <doctest.h>

#include <random>
#include <sstream>

#include "fk/error.hpp"
#include "fk/field_io.hpp"

using namespace fk;

TEST_CASE("FKF1 round trip preserves grid and bits") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n;
    const Grid g(2, {8, 12}, {1.0, 2.5}, BoundaryKind::Periodic);
    std::vector<Field> frames;
    for (int k = 0; k < 3; ++k) {
        Field f(g, 2);
        for (auto& v : f.values()) v = n(rng);
        frames.push_back(f);
    }
    std::stringstream ss;
    write_fields(ss, frames);
    const auto back = read_fields(ss);
    REQUIRE(back.size() == 3);
    for (int k = 0; k < 3; ++k) {
        CHECK(back[k].grid() == g);
        CHECK(back[k].components() == 2);
        for (std::size_t i = 0; i < g.size() * 2; ++i) CHECK(back[k][i] == frames[k][i]);
    }
}

TEST_CASE("FKF1 header is a JSON line") {
    const Grid g = make_grid(1, 65, 1.0, BoundaryKind::DirichletZero);
    std::stringstream ss;
    write_fields(ss, {Field(g)});
    std::string line;
    std::getline(ss, line);
    const auto h = nlohmann::json::parse(line);
    CHECK(h.at("format") == "FKF1");
    CHECK(h.at("boundary") == "dirichlet");
    CHECK(h.at("count") == 1);
    CHECK(h.at("resolution")[0] == 65);
}

TEST_CASE("FKF1 rejects truncated and malformed input") {
    const Grid g = make_grid(1, 16, 1.0, BoundaryKind::Periodic);
    std::stringstream ss;
    write_fields(ss, {Field(g), Field(g)});
    std::string bytes = ss.str();
    std::stringstream truncated(bytes.substr(0, bytes.size() - 8));
    CHECK_THROWS_AS(read_fields(truncated), FormatError);
    std::stringstream garbage("not json\n");
    CHECK_THROWS_AS(read_fields(garbage), FormatError);
    std::stringstream wrong(R"({"format":"XXX1"})" "\n");
    CHECK_THROWS_AS(read_fields(wrong), FormatError);
}
