#include <gtest/gtest.h>

#include "revoca/sim.hpp"
#include "support.hpp"

using namespace revoca;
using namespace revoca::sim;
using revoca::testing::code_of;

namespace {

ScenarioConfig small(std::uint64_t seed = 7) {
  ScenarioConfig c;
  c.holders = 30;
  c.vcs_per_holder = 2;
  c.days = 5;
  c.presentations_per_day = 40;
  c.daily_revocation_rate = 0.1;
  c.rng_seed = seed;
  c.params = tables::TableParams{64, 64, 2, 16};
  return c;
}

}  // namespace

TEST(Config, ValidationAndRoundTrip) {
  ScenarioConfig{}.validate();
  auto bad = [](auto mutate) {
    ScenarioConfig c;
    mutate(c);
    return code_of([&] { c.validate(); });
  };
  EXPECT_EQ(bad([](auto& c) { c.holders = 0; }), Errc::parameter);
  EXPECT_EQ(bad([](auto& c) { c.vcs_per_holder = 0; }), Errc::parameter);
  EXPECT_EQ(bad([](auto& c) { c.days = 0; }), Errc::parameter);
  EXPECT_EQ(bad([](auto& c) { c.daily_revocation_rate = 1.5; }), Errc::parameter);
  EXPECT_EQ(bad([](auto& c) { c.past_auth_probability = -0.1; }), Errc::parameter);
  EXPECT_EQ(bad([](auto& c) { c.params.sigma = 3; }), Errc::parameter);

  auto c = small();
  c.scheme = ahibe::SecurityLevel::standard;
  c.forgeries_per_day = 3;
  const auto back = ScenarioConfig::from_value(c.to_value());
  EXPECT_EQ(canonical::encode(back.to_value()), canonical::encode(c.to_value()));
  EXPECT_EQ(back.scheme, ahibe::SecurityLevel::standard);
  EXPECT_EQ(back.params, c.params);
}

TEST(RatioText, FixedPoint) {
  EXPECT_EQ(ratio_text(1, 3), "0.3333");
  EXPECT_EQ(ratio_text(2, 3), "0.6667");
  EXPECT_EQ(ratio_text(10, 1), "10.0000");
  EXPECT_EQ(ratio_text(0, 0), "0.0000");
}

TEST(Scenario, ZeroRevocationRateGivesNoRevokedVerdicts) {
  auto c = small();
  c.daily_revocation_rate = 0;
  const auto r = run(c);
  EXPECT_EQ(r.total.revoked_verdicts, 0u);
  EXPECT_EQ(r.total.true_positives, 0u);
  EXPECT_EQ(r.total.false_positives, 0u);
  EXPECT_EQ(r.total.false_negatives, 0u);
  EXPECT_EQ(r.total.true_negatives, r.total.checks);
  for (const auto& d : r.days) {
    EXPECT_EQ(d.revocations_published, 0u);
    EXPECT_EQ(d.overflow_entries, 0u);
  }
}

TEST(Scenario, DefaultConfigRunsAreBitIdentical) {
  const ScenarioConfig c;
  const auto a = run(c);
  const auto b = run(c);
  EXPECT_EQ(a.encode(), b.encode());
  EXPECT_NE(a.encode(), run(small(8)).encode());
  // the report is canonical and carries no wall-clock field
  const auto text = to_string(a.encode());
  EXPECT_EQ(canonical::encode(canonical::decode(a.encode())), a.encode());
  EXPECT_EQ(text.find("rebuild"), std::string::npos);
}

TEST(Scenario, HonestVerdictsAreExactAndForgeriesRejected) {
  for (std::uint64_t seed : {1, 2, 3}) {
    auto c = small(seed);
    c.forgeries_per_day = 20;
    c.past_auth_probability = 0.5;
    c.future_auth_probability = 0.5;
    const auto r = run(c);
    const auto& t = r.total;
    EXPECT_EQ(t.false_positives, 0u);
    EXPECT_EQ(t.false_negatives, 0u);
    EXPECT_EQ(t.document_mismatches, 0u);
    EXPECT_TRUE(t.rejections.empty());
    EXPECT_GT(t.true_positives, 0u);
    EXPECT_EQ(t.true_positives + t.true_negatives, t.checks);
    EXPECT_EQ(t.revoked_verdicts, t.true_positives);
    EXPECT_EQ(t.forged, 100u);
    EXPECT_EQ(t.forged_rejected, t.forged);
    EXPECT_EQ(t.forged_wrong_class, 0u);
    EXPECT_GT(t.deferred, 0u);
    EXPECT_GT(t.deferred_resolved, 0u);
    ASSERT_EQ(r.days.size(), 5u);
    for (const auto& d : r.days) EXPECT_EQ(d.table_size, 64u);
  }
}

TEST(Scenario, VerdictsAgreeAcrossSchemes) {
  ScenarioConfig c;
  c.holders = 8;
  c.vcs_per_holder = 2;
  c.days = 4;
  c.presentations_per_day = 10;
  c.daily_revocation_rate = 0.2;
  c.forgeries_per_day = 4;
  c.params = tables::TableParams{32, 32, 2, 4};
  const auto transparent = run(c);
  c.scheme = ahibe::SecurityLevel::standard;
  const auto pairing = run(c);
  auto verdicts = [](const ScenarioReport& r) {
    std::vector<std::uint64_t> v;
    for (const auto& d : r.days)
      for (auto x : {d.counts.checks, d.counts.true_positives, d.counts.true_negatives, d.counts.deferred,
                     d.counts.deferred_resolved, d.counts.forged_rejected, d.revocations_published})
        v.push_back(x);
    return v;
  };
  EXPECT_EQ(verdicts(pairing), verdicts(transparent));
  EXPECT_GT(transparent.total.true_positives, 0u);
  EXPECT_NE(pairing.total.table_bytes, transparent.total.table_bytes);
}

TEST(Scenario, HolderBytesIndependentOfPopulation) {
  auto c = small();
  c.days = 3;
  c.presentations_per_day = 150;
  c.future_auth_probability = 0;
  c.past_auth_probability = 0;
  std::vector<std::uint64_t> maxima;
  for (std::uint64_t holders : {10, 100, 1000}) {
    c.holders = holders;
    c.params = tables::TableParams{256, 256, 4, 1};
    const auto r = run(c);
    maxima.push_back(r.total.holder_bytes_max);
    EXPECT_LE(r.total.holder_bytes, r.total.presentations * r.total.holder_bytes_max);
  }
  EXPECT_EQ(maxima[0], maxima[1]);
  EXPECT_EQ(maxima[1], maxima[2]);
}

TEST(Scenario, ReportShape) {
  const auto r = run(small());
  const auto v = canonical::decode(r.encode());
  EXPECT_EQ(v.at("kind"), "scenario-report");
  EXPECT_EQ(v.at("days").size(), 5u);
  const auto text = r.text_table();
  EXPECT_NE(text.find("rebuild_ms"), std::string::npos);
  EXPECT_NE(text.find("total"), std::string::npos);
  std::uint64_t published = 0;
  for (const auto& d : r.days) {
    published += d.revocations_published;
    EXPECT_GT(d.check_table_bytes, 0u);
    EXPECT_GT(d.revocation_table_bytes, 0u);
    EXPECT_LE(d.overflow_max, d.overflow_entries);
  }
  EXPECT_GT(published, 0u);
}
