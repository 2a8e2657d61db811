#include "revoca/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <optional>
#include <random>

#include "revoca/actors.hpp"
#include "revoca/errors.hpp"
#include "revoca/random.hpp"
#include "revoca/service.hpp"

namespace revoca::sim {

using canonical::Value;

namespace {

std::string fraction_text(double f) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", f);
  return buf;
}

double fraction_field(const Value& v, std::string_view key) {
  auto text = canonical::text_field(v, key);
  char* end = nullptr;
  double f = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size()) throw Error(Errc::decode, "bad fraction " + text);
  return f;
}

std::string_view scheme_name(ahibe::SecurityLevel s) { return s == ahibe::SecurityLevel::test ? "test" : "standard"; }

}  // namespace

std::string ratio_text(std::uint64_t num, std::uint64_t den) {
  if (den == 0) return "0.0000";
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.4f", static_cast<double>(num) / static_cast<double>(den));
  return buf;
}

// ---------------------------------------------------------------------------
// Config

void ScenarioConfig::validate() const {
  auto fraction = [](double f) { return f >= 0.0 && f <= 1.0; };
  if (holders == 0 || vcs_per_holder == 0 || days == 0)
    throw Error(Errc::parameter, "holders, vcs_per_holder and days must be positive");
  if (!fraction(daily_revocation_rate) || !fraction(past_auth_probability) || !fraction(future_auth_probability))
    throw Error(Errc::parameter, "probabilities must lie in [0,1]");
  params.validate();
}

Value ScenarioConfig::to_value() const {
  return {{"daily_revocation_rate", fraction_text(daily_revocation_rate)},
          {"days", days},
          {"first_day", first_day.value},
          {"forgeries_per_day", forgeries_per_day},
          {"future_auth_probability", fraction_text(future_auth_probability)},
          {"holders", holders},
          {"params", params.to_value()},
          {"past_auth_probability", fraction_text(past_auth_probability)},
          {"presentations_per_day", presentations_per_day},
          {"rng_seed", rng_seed},
          {"scheme", scheme_name(scheme)},
          {"vcs_per_holder", vcs_per_holder}};
}

ScenarioConfig ScenarioConfig::from_value(const Value& v) {
  ScenarioConfig c;
  c.holders = canonical::uint_field(v, "holders");
  c.vcs_per_holder = canonical::uint_field(v, "vcs_per_holder");
  c.days = canonical::uint_field(v, "days");
  c.daily_revocation_rate = fraction_field(v, "daily_revocation_rate");
  c.presentations_per_day = canonical::uint_field(v, "presentations_per_day");
  c.past_auth_probability = fraction_field(v, "past_auth_probability");
  c.future_auth_probability = fraction_field(v, "future_auth_probability");
  c.rng_seed = canonical::uint_field(v, "rng_seed");
  c.params = tables::TableParams::from_value(canonical::field(v, "params"));
  auto scheme = canonical::text_field(v, "scheme");
  if (scheme == "test") {
    c.scheme = ahibe::SecurityLevel::test;
  } else if (scheme == "standard") {
    c.scheme = ahibe::SecurityLevel::standard;
  } else {
    throw Error(Errc::decode, "unknown scheme " + scheme);
  }
  c.forgeries_per_day = canonical::uint_field(v, "forgeries_per_day");
  c.first_day = DayIndex{canonical::uint_field(v, "first_day")};
  c.validate();
  return c;
}

// ---------------------------------------------------------------------------
// Report

void Counts::add(const Counts& o) {
  presentations += o.presentations;
  checks += o.checks;
  revoked_verdicts += o.revoked_verdicts;
  true_positives += o.true_positives;
  true_negatives += o.true_negatives;
  false_positives += o.false_positives;
  false_negatives += o.false_negatives;
  document_mismatches += o.document_mismatches;
  deferred += o.deferred;
  deferred_resolved += o.deferred_resolved;
  for (const auto& [k, n] : o.rejections) rejections[k] += n;
  forged += o.forged;
  forged_rejected += o.forged_rejected;
  forged_wrong_class += o.forged_wrong_class;
  segment_bytes += o.segment_bytes;
  table_bytes += o.table_bytes;
  holder_bytes += o.holder_bytes;
  holder_bytes_max = std::max(holder_bytes_max, o.holder_bytes_max);
}

Value Counts::to_value() const {
  Value rej = Value::object();
  for (const auto& [k, n] : rejections) rej[k] = n;
  return {{"checks", checks},
          {"deferred", deferred},
          {"deferred_resolved", deferred_resolved},
          {"document_mismatches", document_mismatches},
          {"false_negatives", false_negatives},
          {"false_positives", false_positives},
          {"forged", forged},
          {"forged_rejected", forged_rejected},
          {"forged_wrong_class", forged_wrong_class},
          {"holder_bytes_max", holder_bytes_max},
          {"holder_bytes_mean", ratio_text(holder_bytes, presentations)},
          {"holder_bytes_total", holder_bytes},
          {"presentations", presentations},
          {"rejections", std::move(rej)},
          {"revoked_verdicts", revoked_verdicts},
          {"segment_bytes_mean", ratio_text(segment_bytes, checks)},
          {"segment_bytes_total", segment_bytes},
          {"table_bytes_mean", ratio_text(table_bytes, checks)},
          {"table_bytes_total", table_bytes},
          {"true_negatives", true_negatives},
          {"true_positives", true_positives}};
}

Value DayReport::to_value() const {
  return {{"active_credentials", active_credentials},
          {"check_table_bytes", check_table_bytes},
          {"counts", counts.to_value()},
          {"day", day.value},
          {"overflow_entries", overflow_entries},
          {"overflow_max", overflow_max},
          {"overflow_mean", ratio_text(overflow_entries, table_size)},
          {"revocation_table_bytes", revocation_table_bytes},
          {"revocations_published", revocations_published}};
}

Value ScenarioReport::to_value() const {
  Value days_v = Value::array();
  for (const auto& d : days) days_v.push_back(d.to_value());
  return {{"config", config.to_value()},
          {"days", std::move(days_v)},
          {"deferred_unresolved", deferred_unresolved},
          {"kind", "scenario-report"},
          {"total", total.to_value()},
          {"version", "1"}};
}

Bytes ScenarioReport::encode() const { return canonical::encode(to_value()); }

std::string ScenarioReport::text_table() const {
  std::string out;
  char line[512];
  auto row = [&](const std::string& label, std::uint64_t revs, const Counts& c, const std::string& ovf_mean,
                 std::uint64_t ovf_max, double ms) {
    std::uint64_t rejected = 0;
    for (const auto& [k, n] : c.rejections) rejected += n;
    std::snprintf(line, sizeof line,
                  "%-6s %5llu %6llu %6llu %5llu %6llu %4llu %4llu %6llu %5llu %7s %10s %9s %8s %4llu %10.1f\n",
                  label.c_str(), (unsigned long long)revs, (unsigned long long)c.presentations,
                  (unsigned long long)c.checks, (unsigned long long)c.true_positives,
                  (unsigned long long)c.true_negatives, (unsigned long long)c.false_positives,
                  (unsigned long long)c.false_negatives, (unsigned long long)c.deferred,
                  (unsigned long long)(rejected + c.forged_rejected), ratio_text(c.segment_bytes, c.checks).c_str(),
                  ratio_text(c.table_bytes, c.checks).c_str(), ratio_text(c.holder_bytes, c.presentations).c_str(),
                  ovf_mean.c_str(), (unsigned long long)ovf_max, ms);
    out += line;
  };
  std::snprintf(line, sizeof line, "%-6s %5s %6s %6s %5s %6s %4s %4s %6s %5s %7s %10s %9s %8s %4s %10s\n", "day",
                "revs", "pres", "checks", "TP", "TN", "FP", "FN", "defer", "rej", "seg_B", "table_B", "holder_B",
                "ovf_avg", "ovf", "rebuild_ms");
  out += line;
  std::uint64_t revs = 0, ovf_max = 0, ovf_entries = 0, slots = 0;
  double ms = 0;
  for (const auto& d : days) {
    row(std::to_string(d.day.value), d.revocations_published, d.counts, ratio_text(d.overflow_entries, d.table_size),
        d.overflow_max, d.rebuild_ms);
    revs += d.revocations_published;
    ovf_max = std::max(ovf_max, d.overflow_max);
    ovf_entries += d.overflow_entries;
    slots += d.table_size;
    ms += d.rebuild_ms;
  }
  row("total", revs, total, ratio_text(ovf_entries, slots), ovf_max, ms);
  std::snprintf(line, sizeof line, "forged %llu, rejected %llu, wrong class %llu; deferred unresolved %llu\n",
                (unsigned long long)total.forged, (unsigned long long)total.forged_rejected,
                (unsigned long long)total.forged_wrong_class, (unsigned long long)deferred_unresolved);
  out += line;
  return out;
}

// ---------------------------------------------------------------------------
// Run

namespace {

struct SimCredential {
  std::size_t holder = 0;
  VcId vc_id;
  DayIndex issued;
  DayIndex expiry;
  std::vector<actors::PublishedDocument> ledger;  // ground truth

  bool valid_on(DayIndex d) const { return issued <= d && d <= expiry; }
  std::vector<tables::RevocationDocument> truth(DayIndex d) const {
    std::vector<tables::RevocationDocument> out;
    for (const auto& p : ledger)
      if (p.published_day <= d) out.push_back(p.document);
    return out;
  }
};

struct Pending {
  actors::Presentation presentation;
  std::size_t vc = 0;
};

enum class Forgery { random_token, other_vc_token, other_day_key, other_holder_key };

class Scenario {
 public:
  explicit Scenario(const ScenarioConfig& config)
      : config_(config), scenario_rng_(config.rng_seed), crypto_rng_(config.rng_seed) {}

  ScenarioReport run();

 private:
  std::uint64_t next() { return scenario_rng_(); }
  std::uint64_t uniform(std::uint64_t n) { return next() % n; }
  // 53-bit fraction; avoids library-specific distributions.
  bool chance(double p) { return static_cast<double>(next() >> 11) * 0x1.0p-53 < p; }
  DayIndex uniform_day(DayIndex lo, DayIndex hi) { return DayIndex{lo.value + uniform(hi.value - lo.value + 1)}; }

  void setup(DayReport& day0);
  void revoke_today(DayIndex today, DayReport& report);
  void present_today(DayIndex today, Counts& counts);
  void resolve_pending(DayIndex today, Counts& counts);
  void forge_today(DayIndex today, Counts& counts);
  void evaluate(const actors::StatusResult& result, const SimCredential& vc, bool resolving, Counts& counts);
  void close_day(DayIndex today, DayReport& report);

  const ScenarioConfig& config_;
  std::mt19937_64 scenario_rng_;
  DeterministicRandom crypto_rng_;

  std::optional<actors::Issuer> issuer_;
  ahibe::MasterPublicParams mpp_;
  service::MemoryStore store_;
  std::optional<service::Publisher> publisher_;
  std::optional<service::InProcessTransport> transport_;
  std::optional<service::Client> client_;
  actors::TrustStore trust_;

  std::vector<std::string> roots_;
  std::vector<ahibe::HolderKey> holder_keys_;
  std::vector<actors::Wallet> wallets_;
  std::vector<SimCredential> vcs_;
  std::map<DayIndex, std::vector<Pending>> pending_;
  std::uint64_t forgery_counter_ = 0;
};

void Scenario::setup(DayReport& day0) {
  const auto start = std::chrono::steady_clock::now();
  const DayIndex today = config_.first_day;
  auto [mpp, msk] = actors::pkg_setup(config_.scheme, crypto_rng_);
  mpp_ = mpp;
  issuer_.emplace(actors::Issuer::init("sim-issuer", mpp_, config_.params, today, crypto_rng_));
  const auto& state = issuer_->state();
  store_.put_params(service::encode(service::make_params_document(mpp_, config_.params, 0, 86400, state.issuer_id,
                                                                  state.signing_key.secret)));
  trust_.add(state.issuer_id, issuer_->public_key());
  publisher_.emplace(store_);
  transport_.emplace(*publisher_);
  client_.emplace(*transport_, &trust_);

  const DayIndex last{today.value + config_.days - 1};
  for (std::uint64_t h = 0; h < config_.holders; ++h) {
    char root[32];
    std::snprintf(root, sizeof root, "holder-%06llu", (unsigned long long)h);
    roots_.emplace_back(root);
    holder_keys_.push_back(actors::pkg_extract(msk, roots_.back(), crypto_rng_));
    wallets_.emplace_back();
    for (std::uint64_t i = 0; i < config_.vcs_per_holder; ++i) {
      // Expiry spread from mid-scenario to a few days past the end.
      const DayIndex expiry = uniform_day(DayIndex{today.value + config_.days / 2}, DayIndex{last.value + 5});
      auto pop = crypto::generate_signing_key(crypto_rng_);
      auto issued = issuer_->issue(roots_.back(), {{"holder", roots_.back()}, {"index", i}}, expiry, pop.public_key);
      wallets_.back().store(issued.credential, issued.seed, holder_keys_.back(), pop.secret, issuer_->public_key());
      vcs_.push_back({h, issued.credential.vc_id, today, expiry, {}});
    }
  }
  issuer_->set_publish_hook([this](const auto& check, const auto& rev) { store_.put_day(check, rev); });
  day0.rebuild_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

void Scenario::revoke_today(DayIndex today, DayReport& report) {
  static constexpr tables::RevocationStatus kStatuses[] = {
      tables::RevocationStatus::revoked, tables::RevocationStatus::suspended, tables::RevocationStatus::conditioned};
  for (auto& vc : vcs_) {
    if (!vc.valid_on(today) || !chance(config_.daily_revocation_rate)) continue;
    tables::RevocationDocument doc;
    doc.vc_id = vc.vc_id;
    doc.status = kStatuses[uniform(3)];
    doc.reason = "scenario-" + std::to_string(today.value);
    if (doc.status == tables::RevocationStatus::conditioned) doc.constraints = {{"territory", "outside-eu"}};
    doc.effective_from = today;
    doc.sequence = vc.ledger.size() + 1;
    issuer_->revoke(vc.vc_id, doc, today);
    vc.ledger.push_back({std::move(doc), today});
    ++report.revocations_published;
  }
}

void Scenario::evaluate(const actors::StatusResult& result, const SimCredential& vc, bool resolving, Counts& counts) {
  counts.segment_bytes += result.segment_bytes;
  counts.table_bytes += result.table_bytes;
  for (const auto& d : result.days) {
    if (d.verdict == actors::Verdict::deferred) continue;
    ++counts.checks;
    if (resolving) ++counts.deferred_resolved;
    const auto truth = vc.truth(d.day);
    if (d.verdict == actors::Verdict::revoked) {
      ++counts.revoked_verdicts;
      if (truth.empty()) {
        ++counts.false_positives;
      } else if (truth == d.documents) {
        ++counts.true_positives;
      } else {
        ++counts.document_mismatches;
      }
    } else if (truth.empty()) {
      ++counts.true_negatives;
    } else {
      ++counts.false_negatives;
    }
  }
}

void Scenario::present_today(DayIndex today, Counts& counts) {
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < vcs_.size(); ++i)
    if (vcs_[i].valid_on(today)) active.push_back(i);
  if (active.empty()) return;

  for (std::uint64_t n = 0; n < config_.presentations_per_day; ++n) {
    const std::size_t index = active[uniform(active.size())];
    const auto& vc = vcs_[index];
    std::vector<DayIndex> days{today};
    if (chance(config_.past_auth_probability) && vc.issued < today)
      days.push_back(uniform_day(vc.issued, DayIndex{today.value - 1}));
    if (chance(config_.future_auth_probability) && today < vc.expiry)
      days.push_back(uniform_day(DayIndex{today.value + 1}, std::min(vc.expiry, DayIndex{today.value + 3})));
    std::sort(days.begin(), days.end());
    auto nonce = actors::Nonce{};
    for (auto& b : nonce.bytes) b = static_cast<std::uint8_t>(next());

    // Holder side: the only output is the presentation file.
    const auto wire = canonical::encode(wallets_[vc.holder].present(vc.vc_id, days, nonce, crypto_rng_).to_value());
    ++counts.presentations;
    counts.holder_bytes += wire.size();
    counts.holder_bytes_max = std::max<std::uint64_t>(counts.holder_bytes_max, wire.size());

    try {
      const auto presentation = actors::Presentation::from_value(canonical::decode(wire));
      const auto result =
          actors::verifier_check(presentation, trust_, *client_, today, actors::CheckOptions{nonce}, crypto_rng_);
      evaluate(result, vc, false, counts);
      for (const auto& auth : presentation.authorizations) {
        if (auth.day <= today) continue;
        ++counts.deferred;
        auto trimmed = presentation;
        trimmed.authorizations = {auth};
        pending_[auth.day].push_back({std::move(trimmed), index});
      }
    } catch (const Error& e) {
      ++counts.rejections[std::string(errc_name(e.code()))];
    }
  }
}

void Scenario::resolve_pending(DayIndex today, Counts& counts) {
  auto it = pending_.find(today);
  if (it == pending_.end()) return;
  for (const auto& p : it->second) {
    try {
      const auto result = actors::verifier_check(p.presentation, trust_, *client_, today, {}, crypto_rng_);
      evaluate(result, vcs_[p.vc], true, counts);
    } catch (const Error& e) {
      ++counts.rejections[std::string(errc_name(e.code()))];
    }
  }
  pending_.erase(it);
}

void Scenario::forge_today(DayIndex today, Counts& counts) {
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < vcs_.size(); ++i)
    if (vcs_[i].valid_on(today)) active.push_back(i);
  if (active.empty()) return;

  for (std::uint64_t n = 0; n < config_.forgeries_per_day; ++n) {
    auto kind = static_cast<Forgery>(forgery_counter_++ % 4);
    const auto& vc = vcs_[active[uniform(active.size())]];
    if (kind == Forgery::other_vc_token && active.size() < 2) kind = Forgery::random_token;
    if (kind == Forgery::other_holder_key && config_.holders < 2) kind = Forgery::other_day_key;

    actors::Nonce nonce;
    for (auto& b : nonce.bytes) b = static_cast<std::uint8_t>(next());
    auto p = wallets_[vc.holder].present(vc.vc_id, {today}, nonce, crypto_rng_);
    auto& auth = p.authorizations.front();
    Errc expected = Errc::check_digest_not_found;
    switch (kind) {
      case Forgery::random_token:
        for (auto& b : auth.day_token.bytes) b = static_cast<std::uint8_t>(next());
        break;
      case Forgery::other_vc_token: {
        std::size_t other = active[uniform(active.size())];
        while (vcs_[other].vc_id == vc.vc_id) other = active[uniform(active.size())];
        const auto& rec = wallets_[vcs_[other].holder].record(vcs_[other].vc_id);
        auth.day_token = crypto::derive_day_token(rec.seed, life_day(rec.credential.issued_day, today));
        break;
      }
      case Forgery::other_day_key: {
        // A genuine key for a neighbouring day, relabelled as today's.
        const DayIndex other{today.value > 0 ? today.value - 1 : today.value + 1};
        auth.day_key = ahibe::delegate(holder_keys_[vc.holder], other, crypto_rng_);
        auth.day_key.identity = ahibe::IdentityPath::for_day(roots_[vc.holder], today);
        expected = Errc::key_probe_failed;
        break;
      }
      case Forgery::other_holder_key: {
        std::size_t other = uniform(config_.holders);
        while (other == vc.holder) other = uniform(config_.holders);
        auth.day_key = ahibe::delegate(holder_keys_[other], today, crypto_rng_);
        auth.day_key.identity = ahibe::IdentityPath::for_day(roots_[vc.holder], today);
        expected = Errc::key_probe_failed;
        break;
      }
    }
    ++counts.forged;
    try {
      actors::verifier_check(p, trust_, *client_, today, actors::CheckOptions{nonce}, crypto_rng_);
    } catch (const Error& e) {
      ++counts.forged_rejected;
      if (e.code() != expected) ++counts.forged_wrong_class;
    }
  }
}

void Scenario::close_day(DayIndex today, DayReport& report) {
  const auto [check, revocation] = issuer_->export_day();
  report.day = today;
  report.active_credentials = check.digest_count();
  report.table_size = revocation.params.d;
  report.overflow_entries = revocation.entry_count();
  for (const auto& bucket : revocation.buckets)
    report.overflow_max = std::max<std::uint64_t>(report.overflow_max, bucket.size());
  report.check_table_bytes = store_.check_table(today)->size();
  report.revocation_table_bytes = store_.revocation_table(today)->size();
}

ScenarioReport Scenario::run() {
  ScenarioReport report;
  report.config = config_;
  for (std::uint64_t t = 0; t < config_.days; ++t) {
    const DayIndex today{config_.first_day.value + t};
    DayReport day;
    if (t == 0) {
      setup(day);
    } else {
      const auto start = std::chrono::steady_clock::now();
      issuer_->rollover(today);
      day.rebuild_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    }
    revoke_today(today, day);
    resolve_pending(today, day.counts);
    present_today(today, day.counts);
    forge_today(today, day.counts);
    close_day(today, day);
    report.total.add(day.counts);
    report.days.push_back(std::move(day));
  }
  for (const auto& [d, list] : pending_) report.deferred_unresolved += list.size();
  return report;
}

}  // namespace

ScenarioReport run(const ScenarioConfig& config) {
  config.validate();
  return Scenario(config).run();
}

}  // namespace revoca::sim
