#include "wavinv/io.hpp"

#include "wavinv/errors.hpp"
#include "wavinv/verify.hpp"

#include <doctest.h>

using namespace wavinv;

TEST_CASE("domain JSON round trip, canonical and order-independent") {
    DomainSpec spec = verify::random_symmetric_domain(404, 2, 3, 4);
    io::ordered_json j = io::domain_to_json(spec);
    DomainSpec back = io::domain_from_json(j);
    CHECK(back.n == spec.n);
    CHECK(back.L == doctest::Approx(spec.L));
    spec.F.for_each([&](const MultiIndex& g, double v) { CHECK(back.F.coeff(g) == doctest::Approx(v)); });

    // writer output is byte-stable
    CHECK(io::dump(j) == io::dump(io::domain_to_json(back)));

    // reader accepts shuffled coefficient order
    io::ordered_json shuffled = j;
    auto& coeffs = shuffled["F"]["coeffs"];
    std::reverse(coeffs.begin(), coeffs.end());
    DomainSpec back2 = io::domain_from_json(shuffled);
    spec.F.for_each([&](const MultiIndex& g, double v) { CHECK(back2.F.coeff(g) == doctest::Approx(v)); });
}

TEST_CASE("17-digit float serialization is lossless") {
    Jet F(1, 2);
    F.set_coeff(MultiIndex{1}, -0.123456789012345678);
    DomainSpec spec = make_symmetric_domain(2, 1.0 / 3.0, F);
    std::string text = io::dump(io::domain_to_json(spec));
    DomainSpec back = io::domain_from_json(io::ordered_json::parse(text));
    CHECK(back.L == spec.L); // bit-exact
    CHECK(back.F.coeff(MultiIndex{1}) == spec.F.coeff(MultiIndex{1}));
}

TEST_CASE("table JSON round trip preserves entries and prefactors") {
    DomainSpec spec = verify::random_symmetric_domain(405, 1, 2, 4);
    WaveInvariantTable table = forward_table(spec, 3, 1);
    io::ordered_json j = io::table_to_json(table);
    WaveInvariantTable back = io::table_from_json(j);
    CHECK(back.entries.size() == table.entries.size());
    for (const auto& [key, val] : table.entries) {
        CHECK(back.at(key.first, key.second).real() == val.real());
        CHECK(back.at(key.first, key.second).imag() == val.imag());
    }
    CHECK(back.det_invariant(2) == doctest::Approx(table.det_invariant(2)));
    CHECK(io::dump(io::table_to_json(back)) == io::dump(j));
}

TEST_CASE("malformed inputs raise SpecError") {
    CHECK_THROWS_AS(io::domain_from_json(io::ordered_json::parse("{}")), SpecError);
    CHECK_THROWS_AS(io::domain_from_json(io::ordered_json::parse(R"({"n":2,"L":-1,"symmetric":true})")),
                    SpecError);
    CHECK_THROWS_AS(io::load_file("/nonexistent/file.json"), SpecError);
}

TEST_CASE("csv emission") {
    DomainSpec spec = verify::random_symmetric_domain(406, 1, 1, 3);
    WaveInvariantTable table = forward_table(spec, 2, 1);
    std::string csv = io::table_to_csv(table);
    CHECK(csv.find("r,j,re,im") == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 5); // header + 4 entries
}
