#include <doctest.h>

#include <json.hpp>

#include "hilmod/io.hpp"

using namespace hilmod;
using nlohmann::json;

TEST_CASE("numeric formatting is precision-faithful") {
    CHECK(io::fmt_real(-1.0, 12) == "-1");
    CHECK(io::fmt_real(0.2, 12) == "0.2");
    CHECK(io::fmt_real(1.0 / 3.0, 6) == "0.333333");
    double x = 0.12345678901234567;
    CHECK(io::round_to_digits(x, 12) == io::round_to_digits(io::round_to_digits(x, 12), 12));
}

TEST_CASE("custom moment tables load from JSON") {
    std::string doc = R"({"variables": 1,
                          "moments": [{"index": [0], "value": 1.0},
                                      {"index": [1], "value": 0.5},
                                      {"index": [2], "value": 0.25}],
                          "tail": "geometric"})";
    MomentSequence mu = io::moments_from_json(doc);
    CHECK(mu.variables() == 1);
    CHECK(mu.at(1) == 0.5);
    CHECK(mu.at(5) == doctest::Approx(1.0 / 32.0));

    std::string bad = R"({"variables": 1, "moments": [{"index": [0], "value": -1.0}],
                          "tail": "reject"})";
    CHECK_THROWS(io::moments_from_json(bad));
    std::string bad_tail = R"({"variables": 1, "moments": [{"index": [0], "value": 1.0}],
                               "tail": "linear"})";
    CHECK_THROWS(io::moments_from_json(bad_tail));
}

TEST_CASE("shift descriptors round-trip") {
    WeightedShift t0 = restriction_shift(KernelSpec::weighted_bergman(0.0), 2, 0);
    std::string text = io::shift_rule_to_json(t0);
    json doc = json::parse(text);
    CHECK(doc.at("kind") == "bergman-power");
    CHECK(doc.at("m") == 2);
    CHECK(doc.at("k") == 0);
    WeightedShift back = io::shift_from_json(text);
    for (int l = 0; l < 64; ++l) CHECK(back.weight(l) == t0.weight(l));

    WeightedShift hardy = restriction_shift(KernelSpec::hardy_disk(), 3, 1);
    json hdoc = json::parse(io::shift_rule_to_json(hardy));
    CHECK(hdoc.at("kind") == "hardy");

    // the documented example descriptor parses
    WeightedShift ex = io::shift_from_json(R"({"kind":"bergman-power","m":2,"k":0})");
    CHECK(ex.weight(0) == doctest::Approx(std::sqrt(1.0 / 3.0)).epsilon(1e-14));
}

TEST_CASE("weight tables round-trip through CSV") {
    WeightedShift s = WeightedShift::from_table({0.5, 0.6, 0.7, 0.8});
    std::string csv = io::weights_to_csv(s, 4, 12);
    CHECK(csv.rfind("index,weight\n", 0) == 0);
    WeightedShift back = io::weights_from_csv(csv);
    for (int l = 0; l < 4; ++l) CHECK(back.weight(l) == s.weight(l));
    CHECK_THROWS(io::weights_from_csv("index,weight\n1,0.5\n"));
}

TEST_CASE("curvature report serialization") {
    Frame f = power_frame(KernelSpec::weighted_bergman(0.0), 2);
    CurvatureReport rep = bundle_curvature(f, Complex(0.0), CurvMethod::Series);
    json doc = json::parse(io::curvature_report_to_json(rep, 12));
    CHECK(doc.at("verdict") == "finite-discrete");
    CHECK(doc.at("omega").at(0) == 0.0);
    CHECK(doc.at("eigenvalues").at(0).get<double>() == doctest::Approx(-3.0));
    CHECK(doc.at("matrix").at(0).at(0).at("re").get<double>() == doctest::Approx(-3.0));
    CHECK(doc.at("matrix").at(0).at(1).at("re").get<double>() == 0.0);
}

TEST_CASE("Hilbert-Samuel serialization") {
    KernelSpec bidisk = KernelSpec::hardy_polydisk(2);
    TruncatedModule mod = TruncatedModule::full(bidisk, 7);
    HilbertSamuelFit fit = hilbert_samuel(mod, {Complex(0.0), Complex(0.0)}, 6);
    json doc = json::parse(io::hs_fit_to_json(fit));
    CHECK(doc.at("degree") == 2);
    CHECK(doc.at("stable_from") == 1);
    CHECK(doc.at("dims") == json::array({1, 3, 6, 10, 15, 21}));
    CHECK(doc.at("poly").get<std::string>() == "(k^2 + k)/2");

    std::string csv = io::hs_dims_to_csv(fit);
    CHECK(csv == "k,dim\n1,1\n2,3\n3,6\n4,10\n5,15\n6,21\n");
}

TEST_CASE("matrix JSON round-trip") {
    Eigen::MatrixXcd m(2, 2);
    m << Complex(0.0, 1.0), Complex(0.5, -0.25), Complex(1.0, 0.0), Complex(-2.0, 0.125);
    std::string text = io::matrix_to_json(m, 15);
    Eigen::MatrixXcd back = io::matrix_from_json(text);
    CHECK((back - m).cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS(io::matrix_from_json(R"({"rows": []})"));
    CHECK_THROWS(io::matrix_from_json(R"({"rows": [[{"re":1}],[{"re":1},{"re":2}]]})"));
}
