// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hemicert/report.hpp"

#include <algorithm>

using namespace hemicert;

namespace {

const LocalCertificate& local_cert() {
    static const LocalCertificate c = verify_local(make_rat(1, 7));
    return c;
}

const GlobalCertificate& global_cert() {
    static const GlobalCertificate c = run_global(SearchConfig{});
    return c;
}

const ReportEntry* find(const RunReport& r, std::string_view key) {
    const auto it = std::find_if(r.entries.begin(), r.entries.end(), [&](const ReportEntry& e) { return e.key == key; });
    return it == r.entries.end() ? nullptr : &*it;
}

bool has_line(const std::string& text, std::string_view line) {
    return text.find("\n" + std::string(line) + "\n") != std::string::npos;
}

}  // namespace

TEST_CASE("sha256 of known strings") {
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("classification names") {
    CHECK(to_string(Classification::exact_match) == "exact-match");
    CHECK(to_string(Classification::expected_deviation) == "expected-deviation");
    CHECK(to_string(Classification::failure) == "FAILURE");
}

TEST_CASE("local report entries") {
    const RunReport r = build_report(&local_cert(), nullptr);
    CHECK(r.has_local);
    CHECK_FALSE(r.has_global);
    CHECK_FALSE(r.has_failure());
    CHECK(r.local_digest == sha256_hex(serialize(local_cert())));
    const ReportEntry* j = find(r, "local.J.terms");
    REQUIRE(j);
    CHECK(j->observed == "1288");
    CHECK(j->classification == Classification::exact_match);
    const ReportEntry* h3 = find(r, "local.H3.terms");
    REQUIRE(h3);
    CHECK(h3->observed == "6");
    CHECK(h3->reference == "20");
    CHECK(h3->classification == Classification::expected_deviation);
    const ReportEntry* h4 = find(r, "local.H4.terms");
    REQUIRE(h4);
    CHECK(h4->classification == Classification::exact_match);
    const std::string text = r.to_text();
    CHECK(text.rfind("hemicert-report 1\n", 0) == 0);
    CHECK(has_line(text, "  local: J terms: 1288 [exact-match]"));
    CHECK(text.find("\nverdict ok\n") != std::string::npos);
}

TEST_CASE("global report entries") {
    const RunReport r = build_report(nullptr, &global_cert());
    CHECK(r.has_global);
    CHECK(r.mode == "trustless");
    CHECK_FALSE(r.has_failure());
    const std::string text = r.to_text();
    CHECK(has_line(text, "  global: circle-meeting cells: 60 [exact-match]"));
    CHECK(has_line(text, "  global: disk-meeting cells: 224 [exact-match]"));
    CHECK(has_line(text, "  global: initial cover: 806400 [exact-match]"));
    CHECK(text.find("key\treference\tobserved\tclassification\tnote") != std::string::npos);
}

TEST_CASE("equal inputs give byte-identical reports") {
    const std::string a = build_report(&local_cert(), &global_cert()).to_text();
    const std::string b = build_report(&local_cert(), &global_cert()).to_text();
    CHECK(a == b);
    // Reparsed certificates carry the same content, timings excepted.
    const LocalCertificate l = parse_local_certificate(serialize(local_cert()));
    const RunReport c = build_report(&l, nullptr);
    CHECK(c.to_text() == build_report(&local_cert(), nullptr).to_text());
}

TEST_CASE("an invalid run is reported as a failure") {
    GlobalCertificate bad = global_cert();
    bad.valid = false;
    bad.dfs.failures = 1;
    const RunReport r = build_report(nullptr, &bad);
    CHECK(r.has_failure());
    CHECK(r.to_text().find("\nverdict FAILURE\n") != std::string::npos);

    const LocalCertificate big = verify_local(Rat(1));
    const RunReport l = build_report(&big, nullptr);
    CHECK(l.has_failure());
}

TEST_CASE("a smaller radius turns radius-dependent values into expected deviations") {
    const LocalCertificate eighth = verify_local(make_rat(1, 8));
    const RunReport r = build_report(&eighth, nullptr);
    CHECK_FALSE(r.has_failure());
    const ReportEntry* s2 = find(r, "local.res5.s2");
    REQUIRE(s2);
    CHECK(s2->classification == Classification::expected_deviation);
    const ReportEntry* j = find(r, "local.J.terms");
    REQUIRE(j);
    CHECK(j->classification == Classification::exact_match);
}
