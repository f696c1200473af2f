#include <filesystem>
#include <fstream>
#include <sstream>

#include "catch_amalgamated.hpp"

#include "dqls/errors.hpp"
#include "dqls/matrix_io.hpp"

TEST_CASE("coordinate streams skip comments and blank lines", "[matrix_io]") {
    std::istringstream in("# header\n0 0 1.5\n\n1 2 -3   # trailing\n  2 1 4e-1\n");
    const auto records = dqls::parse_coordinate_stream(in);
    REQUIRE(records.size() == 3);
    CHECK(records[1].row == 1);
    CHECK(records[1].col == 2);
    CHECK(records[1].value == -3.0);
    CHECK(records[2].value == 0.4);
}

TEST_CASE("malformed records report their line number", "[matrix_io]") {
    std::istringstream bad_value("0 0 1\n# ok\n1 1 abc\n");
    try {
        dqls::parse_coordinate_stream(bad_value);
        FAIL("expected a parse error");
    } catch (const dqls::ParseError &e) {
        CHECK(e.line() == 3);
    }
    std::istringstream too_few("0 1\n");
    CHECK_THROWS_AS(dqls::parse_coordinate_stream(too_few), dqls::ParseError);
    std::istringstream negative("-1 0 2\n");
    CHECK_THROWS_AS(dqls::parse_coordinate_stream(negative), dqls::ParseError);
    std::istringstream extra("0 0 1 9\n");
    CHECK_THROWS_AS(dqls::parse_coordinate_stream(extra), dqls::ParseError);
}

TEST_CASE("dense CSV round trips exactly", "[matrix_io]") {
    Eigen::MatrixXd a(2, 3);
    a << 0.1, -2.0 / 3.0, 5.0, 1e-300, 0.0, -7.25;
    std::stringstream buf;
    dqls::write_dense_csv(buf, a);
    CHECK(dqls::parse_dense_csv(buf) == a);

    std::istringstream ragged("1,2\n3\n");
    CHECK_THROWS_AS(dqls::parse_dense_csv(ragged), dqls::ParseError);
}

TEST_CASE("coordinate output reloads into the same store", "[matrix_io]") {
    Eigen::MatrixXd a(3, 3);
    a << 1.0, 0.0, -0.5, 0.0, 2.0, 0.0, -0.5, 0.0, 3.0;
    const auto path = std::filesystem::temp_directory_path() / "dqls_io_roundtrip.txt";
    {
        std::ofstream out(path);
        dqls::write_coordinate_stream(out, a);
    }
    CHECK(dqls::load_matrix(path).to_dense() == a);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(dqls::load_matrix("/nonexistent/matrix.txt"), dqls::ValidationError);
}

TEST_CASE("vectors parse from spaces or commas", "[matrix_io]") {
    std::istringstream spaced("1 2\n3");
    CHECK(dqls::parse_vector(spaced) == Eigen::Vector3d(1.0, 2.0, 3.0));
    std::istringstream commas("0.5, -0.5");
    CHECK(dqls::parse_vector(commas) == Eigen::Vector2d(0.5, -0.5));
    std::istringstream bad("1, x");
    CHECK_THROWS_AS(dqls::parse_vector(bad), dqls::ParseError);
}
