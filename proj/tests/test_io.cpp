#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>

#include "rmtprod/io.hpp"

using namespace rmtprod;

TEST(SpecParse, GinibreAndJacobi) {
    const ChainSpec s = parse_chain_spec(R"({"beta": 4, "factors": [
        {"kind": "ginibre", "n_out": 5, "n_in": 3},
        {"kind": "jacobi", "n_out": 3, "n_in": 5, "bath_dim": 9}]})");
    EXPECT_EQ(s.dyson.beta, 4);
    ASSERT_EQ(s.size(), 2u);
    EXPECT_EQ(s.factors[0].kind, FactorKind::ginibre);
    EXPECT_EQ(s.factors[1].bath_dim, 9u);
    EXPECT_EQ(s.factors[1].bath_check, BathCheck::strict);
}

TEST(SpecParse, InducedWithBase) {
    const ChainSpec s = parse_chain_spec(R"({"beta": 2, "factors": [
        {"kind": "induced", "base": {"kind": "jacobi", "n_out": 4, "n_in": 6, "bath_dim": 7, "bath_check": "subblock"}}]})");
    ASSERT_EQ(s.size(), 1u);
    EXPECT_EQ(s.factors[0].kind, FactorKind::induced);
    EXPECT_EQ(s.factors[0].n_out, 4u);
    EXPECT_EQ(s.factors[0].base().bath_check, BathCheck::subblock);
}

TEST(SpecParse, RoundTrip) {
    const std::string text = R"({"beta": 1, "factors": [
        {"kind": "ginibre", "n_out": 6, "n_in": 4},
        {"kind": "induced", "base": {"kind": "ginibre", "n_out": 6, "n_in": 9}},
        {"kind": "jacobi", "n_out": 4, "n_in": 6, "bath_dim": 12}]})";
    const ChainSpec s = parse_chain_spec(text);
    const ChainSpec t = parse_chain_spec(to_json(s).dump());
    EXPECT_EQ(to_json(s), to_json(t));
    EXPECT_EQ(t.factors[1].base_in, 9u);
}

TEST(SpecParse, Errors) {
    EXPECT_THROW(parse_chain_spec("{"), spec_parse_error);
    EXPECT_THROW(parse_chain_spec(R"({"factors": []})"), spec_parse_error);
    EXPECT_THROW(parse_chain_spec(R"({"beta": 3, "factors": [{"kind": "ginibre", "n_out": 1, "n_in": 1}]})"),
                 spec_parse_error);
    EXPECT_THROW(parse_chain_spec(R"({"beta": 2, "factors": []})"), spec_parse_error);
    EXPECT_THROW(parse_chain_spec(R"({"beta": 2, "factors": [{"kind": "jacobi", "n_out": 1, "n_in": 1}]})"),
                 spec_parse_error);
    EXPECT_THROW(
        parse_chain_spec(R"({"beta": 2, "factors": [{"kind": "ginibre", "n_out": 1, "n_in": 1, "bath_dim": 4}]})"),
        spec_parse_error);
    EXPECT_THROW(parse_chain_spec(R"({"beta": 2, "factors": [{"kind": "ginibre", "n_out": -1, "n_in": 1}]})"),
                 spec_parse_error);
    EXPECT_THROW(parse_chain_spec(R"({"beta": 2, "factors": [{"kind": "wishart", "n_out": 1, "n_in": 1}]})"),
                 spec_parse_error);
    // strict bath needs L >= n_out + n_in
    EXPECT_THROW(
        parse_chain_spec(R"({"beta": 2, "factors": [{"kind": "jacobi", "n_out": 3, "n_in": 3, "bath_dim": 5}]})"),
        spec_parse_error);
    // dimensions must chain
    EXPECT_THROW(parse_chain_spec(R"({"beta": 2, "factors": [{"kind": "ginibre", "n_out": 3, "n_in": 2},
                                                           {"kind": "ginibre", "n_out": 2, "n_in": 4}]})"),
                 spec_parse_error);
    EXPECT_THROW(parse_chain_spec(R"({"beta": 2, "factors": [{"kind": "induced", "base": {"kind": "induced"}}]})"),
                 spec_parse_error);
}

TEST(SpecParse, LoadFromFile) {
    const std::string path = ::testing::TempDir() + "rmtprod_spec.json";
    {
        std::ofstream os(path);
        os << R"({"beta": 2, "factors": [{"kind": "ginibre", "n_out": 2, "n_in": 2}]})";
    }
    EXPECT_EQ(load_chain_spec(path).size(), 1u);
    std::remove(path.c_str());
    EXPECT_THROW(load_chain_spec(path), spec_parse_error);
}
