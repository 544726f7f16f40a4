#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <finh/classify.hpp>
#include <finh/library.hpp>

using namespace finh;

TEST_CASE("Euclidean baseline classifies as trivially flat") {
    ClassifyOptions opts;
    opts.sites = 20;
    ClassificationReport rep = classify_metric(builtin("euclidean_2d"), opts);
    CHECK(rep.error.empty());
    for (const char* name : {"dually_flat", "projectively_flat", "berwald",
                             "h_berwald", "h_landsberg", "s_scalar_exists"})
        CHECK(rep.verdict(name) == Verdict::holds);
    for (const auto& audit : rep.audits) CHECK(audit.consistent);
}

TEST_CASE("the flat family separates the H-classes") {
    ClassifyOptions opts;
    opts.sites = 25;
    ClassificationReport rep = classify_metric(builtin("najafi_2d_c03"), opts);
    CHECK(rep.error.empty());
    CHECK(rep.verdict("dually_flat") == Verdict::holds);
    CHECK(rep.verdict("projectively_flat") == Verdict::holds);
    CHECK(rep.verdict("s_scalar_exists") == Verdict::holds);
    CHECK(rep.verdict("h_landsberg") == Verdict::holds);
    CHECK(rep.verdict("h_berwald") == Verdict::fails);
    // the failure comes with a concrete witness site
    for (const auto& p : rep.predicates)
        if (p.name == "h_berwald") {
            REQUIRE(p.witness.has_value());
            CHECK(p.witness->residual > 1e-3);
        }
    for (const auto& audit : rep.audits) CHECK(audit.consistent);
}

TEST_CASE("expected verdicts hold across the whole library") {
    ClassifyOptions opts;
    opts.sites = 15;
    for (const LibraryEntry& entry : builtin_entries()) {
        ClassificationReport rep = classify_metric(entry, opts);
        CHECK(rep.error.empty());
        for (const auto& [name, holds] : entry.expected) {
            INFO(entry.name, " / ", name);
            CHECK(rep.verdict(name) ==
                  (holds ? Verdict::holds : Verdict::fails));
        }
    }
}

TEST_CASE("reports are deterministic and carry a definition hash") {
    ClassifyOptions opts;
    opts.sites = 10;
    ClassificationReport a = classify_metric(builtin("ex37"), opts);
    ClassificationReport b = classify_metric(builtin("ex37"), opts);
    CHECK(a.to_json() == b.to_json());
    CHECK(!a.definition_hash.empty());
    CHECK(a.to_json().find(a.definition_hash) != std::string::npos);
    opts.seed = 43;
    ClassificationReport c = classify_metric(builtin("ex37"), opts);
    // verdicts are seed-stable even though the sites differ
    for (size_t i = 0; i < a.predicates.size(); ++i)
        CHECK(a.predicates[i].verdict == c.predicates[i].verdict);
}

TEST_CASE("hard errors surface in the report instead of throwing") {
    LibraryEntry bad = entry_from_definition(
        "bad", "dimension = 2\nmetric = \"sqrt(y1^2)\"\n");
    ClassificationReport rep = classify_metric(bad);
    CHECK(!rep.error.empty());
    for (const auto& p : rep.predicates)
        CHECK(p.verdict == Verdict::inconclusive);
}

TEST_CASE("user metric definitions enter through the same path") {
    LibraryEntry user = entry_from_definition(
        "user", "dimension = 2\nmetric = \"sqrt(y1^2 + y2^2) + x1*y1/4\"\n");
    ClassifyOptions opts;
    opts.sites = 15;
    ClassificationReport rep = classify_metric(user, opts);
    CHECK(rep.error.empty());
    CHECK(rep.dimension == 2);
}
