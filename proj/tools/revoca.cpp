// revoca: one binary, one subcommand per protocol step.

#include <sys/stat.h>

#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "revoca/actors.hpp"
#include "revoca/errors.hpp"
#include "revoca/service.hpp"
#include "revoca/sim.hpp"

namespace fs = std::filesystem;
using namespace revoca;
using canonical::Value;

namespace {

// ---------------------------------------------------------------------------
// Files

struct Paths {
  fs::path root;

  fs::path pkg() const { return root / "pkg"; }
  fs::path issuer() const { return root / "issuer"; }
  fs::path holder() const { return root / "holder"; }
  fs::path verifier() const { return root / "verifier"; }

  fs::path mpp() const { return pkg() / "mpp.params"; }
  fs::path msk() const { return pkg() / "msk.secret"; }
  fs::path issuer_state() const { return issuer() / "issuer.state"; }
  fs::path wallet() const { return holder() / "wallet.store"; }
  fs::path trust() const { return verifier() / "trust.store"; }
};

Value read_value(const fs::path& path) {
  auto bytes = tables::read_file(path);
  try {
    return canonical::decode(bytes);
  } catch (const Error& e) {
    throw Error(Errc::decode, path.string() + ": " + e.what());
  }
}

void write_value(const fs::path& path, const Value& v, bool secret = false) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  // Secret files are created owner-only rather than tightened afterwards.
  const mode_t old = secret ? ::umask(077) : 0;
  try {
    tables::write_file_atomic(path, canonical::encode(v));
  } catch (...) {
    if (secret) ::umask(old);
    throw;
  }
  if (secret) ::umask(old);
}

void print(const Value& v) { std::cout << canonical::encode_text(v) << '\n'; }

// "N" absolute, "+K" / "-K" relative to base.
DayIndex parse_day(const std::string& text, std::optional<DayIndex> base = std::nullopt) {
  if (text.empty()) throw Error(Errc::usage, "empty day");
  const bool relative = text[0] == '+' || text[0] == '-';
  const std::string digits = relative ? text.substr(1) : text;
  if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
    throw Error(Errc::usage, "bad day '" + text + "'");
  const std::uint64_t n = std::stoull(digits);
  if (!relative) return DayIndex{n};
  if (!base) throw Error(Errc::usage, "relative day '" + text + "' needs a reference day");
  if (text[0] == '-' && n > base->value) throw Error(Errc::usage, "day before day 0");
  return DayIndex{text[0] == '+' ? base->value + n : base->value - n};
}

ahibe::SecurityLevel parse_level(const std::string& s) {
  if (s == "test") return ahibe::SecurityLevel::test;
  if (s == "standard") return ahibe::SecurityLevel::standard;
  throw Error(Errc::usage, "level must be test or standard");
}

Value parse_json_arg(const std::string& text, const char* what) {
  try {
    auto v = Value::parse(text);
    if (!v.is_object()) throw Error(Errc::usage, std::string(what) + " must be a JSON object");
    return v;
  } catch (const nlohmann::json::exception&) {
    throw Error(Errc::usage, std::string(what) + " is not valid JSON");
  }
}

actors::TrustStore load_trust(const fs::path& path) {
  if (!fs::exists(path)) return {};
  return actors::TrustStore::from_value(read_value(path));
}

// ---------------------------------------------------------------------------
// Issuer persistence: issuer.state plus the snapshots/ archive.

struct IssuerSession {
  Paths paths;
  tables::SnapshotArchive archive;
  actors::Issuer issuer;

  static IssuerSession open(const Paths& paths) {
    auto state = actors::IssuerState::from_value(read_value(paths.issuer_state()));
    tables::SnapshotArchive archive(service::DirectoryStore::snapshot_dir(paths.issuer()));
    std::optional<tables::CheckTableSnapshot> check;
    std::optional<tables::RevocationTableSnapshot> revocation;
    if (archive.has(state.current_day)) {
      try {
        check = tables::read_check_snapshot(archive.dir() / tables::check_snapshot_name(state.current_day));
        revocation =
            tables::read_revocation_snapshot(archive.dir() / tables::revocation_snapshot_name(state.current_day));
      } catch (const Error&) {
        check.reset();
        revocation.reset();
      }
    }
    auto issuer = actors::Issuer::restore(std::move(state), std::move(check), std::move(revocation));
    return {paths, std::move(archive), std::move(issuer)};
  }

  // Registry first: the archive can always be rebuilt from it.
  void save() {
    write_value(paths.issuer_state(), issuer.state().to_value(), true);
    auto [check, revocation] = issuer.export_day();
    archive.store(check, revocation);
    archive.prune(issuer.current_day());
  }
};

// ---------------------------------------------------------------------------
// Commands

struct Options {
  std::string state_dir;

  std::string level = "test";
  std::string root;
  std::string out;
  std::string in;

  std::string issuer_id = "issuer";
  std::string day;
  std::uint64_t d = 1024, c = 1024, sigma = 4, min_anonymity = 256;
  std::uint64_t epoch = 0, granularity = 86400;

  std::string credential;
  std::string claims = "{}";
  std::string expiry;
  std::string pop_key;
  std::string holder_key;
  std::string vc_id;
  std::string status = "revoked";
  std::string reason;
  std::string constraints = "{}";
  std::string effective_from;
  std::uint64_t sequence = 0;
  std::string bind = "127.0.0.1:8080";

  std::string days;
  std::string nonce;
  std::string snapshot;
  std::string presentation;
  std::string endpoint;
  std::string from_dir;

  sim::ScenarioConfig sim;
  std::string sim_scheme = "test";
  std::string config;
  std::string report;
};

Paths paths_of(const Options& o) {
  if (!o.state_dir.empty()) return {o.state_dir};
  if (const char* env = std::getenv("REVOCA_STATE_DIR"); env && *env) return {env};
  return {"revoca-state"};
}

fs::path or_default(const std::string& given, const fs::path& fallback) {
  return given.empty() ? fallback : fs::path(given);
}

void pkg_setup(const Options& o) {
  const Paths p = paths_of(o);
  auto [mpp, msk] = actors::pkg_setup(parse_level(o.level));
  write_value(p.mpp(), ahibe::to_value(mpp));
  write_value(p.msk(), ahibe::to_value(msk), true);
  print({{"params", p.mpp().string()}, {"scheme", mpp.scheme_id()}, {"secret", p.msk().string()}});
}

void pkg_extract(const Options& o) {
  const Paths p = paths_of(o);
  auto msk = ahibe::secret_from_value(read_value(p.msk()));
  auto hk = actors::pkg_extract(msk, o.root);
  const auto out = or_default(o.out, p.holder() / (o.root + ".hkey"));
  write_value(out, ahibe::to_value(hk), true);
  print({{"holder_key", out.string()}, {"root", o.root}});
}

void issuer_init(const Options& o) {
  const Paths p = paths_of(o);
  auto mpp = ahibe::params_from_value(read_value(or_default(o.in, p.mpp())));
  tables::TableParams params{o.d, o.c, o.sigma, o.min_anonymity};
  if (fs::exists(p.issuer_state())) throw Error(Errc::precondition, "issuer already initialised in " + p.issuer().string());
  const DayIndex day = parse_day(o.day.empty() ? "0" : o.day);
  auto issuer = actors::Issuer::init(o.issuer_id, mpp, params, day);
  const auto doc = service::make_params_document(mpp, params, o.epoch, o.granularity, o.issuer_id,
                                                 issuer.state().signing_key.secret);
  fs::create_directories(p.issuer());
  tables::write_file_atomic(service::DirectoryStore::params_file(p.issuer()), service::encode(doc));
  IssuerSession session{p, tables::SnapshotArchive(service::DirectoryStore::snapshot_dir(p.issuer())), std::move(issuer)};
  session.save();

  auto trust = load_trust(p.trust());
  trust.add(o.issuer_id, session.issuer.public_key());
  write_value(p.trust(), trust.to_value());
  print({{"day", day.value},
         {"issuer_id", o.issuer_id},
         {"params", params.to_value()},
         {"verify_key", to_base64url(session.issuer.public_key().view())}});
}

void issuer_issue(const Options& o) {
  const Paths p = paths_of(o);
  auto session = IssuerSession::open(p);
  const auto pop = read_value(o.pop_key);
  const auto pop_public = canonical::fixed_field<VerifyKey>(pop, "public_key");
  const DayIndex expiry = parse_day(o.expiry, session.issuer.current_day());
  auto issued = session.issuer.issue(o.root, parse_json_arg(o.claims, "--claims"), expiry, pop_public);
  session.save();
  const Value out_v{{"credential", issued.credential.to_value()}, {"seed", to_base64url(issued.seed.view())}};
  const auto out = or_default(o.out, p.holder() / (issued.credential.vc_id.hex() + ".cred"));
  write_value(out, out_v, true);
  print({{"credential", out.string()}, {"vc_id", issued.credential.vc_id.hex()}});
}

void issuer_revoke(const Options& o) {
  const Paths p = paths_of(o);
  auto session = IssuerSession::open(p);
  const DayIndex today = session.issuer.current_day();
  tables::RevocationDocument doc;
  doc.vc_id = VcId::from_hex(o.vc_id);
  doc.status = tables::status_from_name(o.status);
  doc.reason = o.reason;
  doc.constraints = parse_json_arg(o.constraints, "--constraints");
  doc.effective_from = o.effective_from.empty() ? today : parse_day(o.effective_from, today);
  doc.sequence = o.sequence;
  const DayIndex day = o.day.empty() ? today : parse_day(o.day, today);
  auto index = session.issuer.revoke(doc.vc_id, doc, day);
  session.save();
  print({{"bucket", index.value}, {"day", day.value}, {"vc_id", o.vc_id}});
}

void issuer_rollover(const Options& o) {
  const Paths p = paths_of(o);
  auto session = IssuerSession::open(p);
  const DayIndex target = parse_day(o.day, session.issuer.current_day());
  // Every intermediate day is archived as it is produced.
  session.issuer.set_publish_hook([&](const auto& check, const auto& rev) { session.archive.store(check, rev); });
  session.issuer.rollover(target);
  session.issuer.set_publish_hook({});
  session.save();
  Value days = Value::array();
  for (auto d : session.archive.days()) days.push_back(d.value);
  print({{"archived_days", std::move(days)}, {"day", target.value}});
}

void issuer_serve(const Options& o) {
  const Paths p = paths_of(o);
  service::DirectoryStore store(p.issuer());
  service::Publisher publisher(store);
  auto [host, port] = service::parse_bind_address(o.bind);

  // Signals are taken synchronously so the server threads never see them.
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);

  service::HttpServer server(publisher);
  const int bound = server.start(host, port);
  print({{"listening", host + ":" + std::to_string(bound)}});
  std::cout.flush();
  int sig = 0;
  sigwait(&set, &sig);
  server.stop();
}

void holder_keygen(const Options& o) {
  const Paths p = paths_of(o);
  auto kp = crypto::generate_signing_key(system_random());
  const auto out = or_default(o.out, p.holder() / "pop.key");
  write_value(out, {{"public_key", to_base64url(kp.public_key.view())}, {"secret_key", to_base64url(kp.secret.view())}},
              true);
  print({{"pop_key", out.string()}, {"public_key", to_base64url(kp.public_key.view())}});
}

actors::Wallet load_wallet(const Paths& p) {
  if (!fs::exists(p.wallet())) return {};
  return actors::Wallet::from_value(read_value(p.wallet()));
}

void holder_store(const Options& o) {
  const Paths p = paths_of(o);
  const auto issued = read_value(o.credential);
  auto cred = actors::VerifiableCredential::from_value(canonical::field(issued, "credential"));
  const auto seed = canonical::fixed_field<Seed>(issued, "seed");
  auto hk = ahibe::holder_key_from_value(read_value(o.holder_key));
  const auto pop_secret = canonical::fixed_field<SigningKey>(read_value(o.pop_key), "secret_key");
  auto key = load_trust(p.trust()).find(cred.issuer_id);
  if (!key) throw Error(Errc::rejection, "issuer " + cred.issuer_id + " is not in the trust store");
  auto wallet = load_wallet(p);
  const auto vc_id = cred.vc_id;
  wallet.store(std::move(cred), seed, std::move(hk), pop_secret, *key);
  write_value(p.wallet(), wallet.to_value(), true);
  print({{"stored", vc_id.hex()}, {"wallet", p.wallet().string()}});
}

actors::Nonce parse_nonce(const std::string& hex) {
  try {
    return actors::Nonce::from_hex(hex);
  } catch (const Error&) {
    throw Error(Errc::usage, "nonce must be 32 hex characters");
  }
}

void holder_present(const Options& o) {
  const Paths p = paths_of(o);
  const auto wallet = load_wallet(p);
  const auto vc_id = VcId::from_hex(o.vc_id);
  std::vector<DayIndex> days;
  std::string list = o.days;
  for (std::size_t start = 0; start <= list.size();) {
    auto comma = list.find(',', start);
    if (comma == std::string::npos) comma = list.size();
    days.push_back(parse_day(list.substr(start, comma - start)));
    start = comma + 1;
  }
  const auto nonce = parse_nonce(o.nonce);
  const auto presentation = wallet.present(vc_id, days, nonce);
  const auto out = or_default(o.out, fs::path("presentation.pres"));
  write_value(out, presentation.to_value());
  print({{"authorizations", presentation.authorizations.size()}, {"presentation", out.string()}});
}

void holder_audit(const Options& o) {
  const Paths p = paths_of(o);
  const auto wallet = load_wallet(p);
  const auto mpp = ahibe::params_from_value(read_value(or_default(o.in, p.mpp())));
  const auto snapshot = tables::read_revocation_snapshot(o.snapshot);
  auto docs = wallet.audit(VcId::from_hex(o.vc_id), parse_day(o.day), snapshot, mpp);
  Value out = Value::array();
  for (const auto& d : docs) out.push_back(d.to_value());
  print({{"day", parse_day(o.day).value}, {"documents", std::move(out)}});
}

DayIndex wall_clock_day(const service::PublicParamsDocument& doc) {
  const auto now = static_cast<std::uint64_t>(std::time(nullptr));
  if (now < doc.epoch) throw Error(Errc::precondition, "clock is before the protocol epoch");
  return DayIndex{(now - doc.epoch) / doc.granularity_seconds};
}

void verifier_check(const Options& o) {
  const Paths p = paths_of(o);
  const auto presentation = actors::Presentation::from_value(read_value(o.presentation));
  const auto trust = load_trust(or_default(o.in, p.trust()));

  std::unique_ptr<service::SnapshotStore> store;
  std::unique_ptr<service::Publisher> publisher;
  std::unique_ptr<service::Transport> transport;
  if (!o.endpoint.empty()) {
    std::string address = o.endpoint;
    if (address.rfind("http://", 0) == 0) address = address.substr(7);
    if (!address.empty() && address.back() == '/') address.pop_back();
    auto [host, port] = service::parse_bind_address(address);
    transport = std::make_unique<service::HttpTransport>(host, port);
  } else {
    store = std::make_unique<service::DirectoryStore>(or_default(o.from_dir, p.issuer()));
    publisher = std::make_unique<service::Publisher>(*store);
    transport = std::make_unique<service::InProcessTransport>(*publisher);
  }
  service::Client client(*transport, &trust);
  const DayIndex today = o.day.empty() ? wall_clock_day(client.fetch_params()) : parse_day(o.day);
  actors::CheckOptions options;
  if (!o.nonce.empty()) options.expected_nonce = parse_nonce(o.nonce);
  auto result = actors::verifier_check(presentation, trust, client, today, options);
  auto v = result.to_value();
  v["revoked"] = result.any_revoked();
  v["vc_id"] = presentation.credential.vc_id.hex();
  print(v);
}

void sim_run(const Options& o) {
  const Paths p = paths_of(o);
  sim::ScenarioConfig config = o.sim;
  if (!o.config.empty()) {
    config = sim::ScenarioConfig::from_value(read_value(o.config));
  } else {
    config.scheme = parse_level(o.sim_scheme);
    config.params = {o.d, o.c, o.sigma, o.min_anonymity};
  }
  auto report = sim::run(config);
  const auto out = or_default(o.report, p.root / "report.rep");
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  tables::write_file_atomic(out, report.encode());
  std::cout << report.text_table() << "report: " << out.string() << '\n';
}

// ---------------------------------------------------------------------------

void fail(Errc code, std::string message) {
  const std::string prefix = std::string(errc_name(code)) + ": ";
  if (message.starts_with(prefix)) message.erase(0, prefix.size());
  std::cerr << canonical::encode_text({{"error", std::string(errc_name(code))}, {"message", message}}) << '\n';
}

void add_table_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--d", o.d, "revocation table size");
  cmd->add_option("--c", o.c, "check table buckets");
  cmd->add_option("--sigma", o.sigma, "check table segments");
  cmd->add_option("--min-anonymity", o.min_anonymity, "target digests per segment");
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Privacy-preserving revocation for verifiable credentials"};
  app.require_subcommand(1);
  app.add_option("--state-dir", o.state_dir, "state directory (default $REVOCA_STATE_DIR or ./revoca-state)");

  auto* pkg = app.add_subcommand("pkg", "private key generator")->require_subcommand(1);
  auto* pkg_setup_cmd = pkg->add_subcommand("setup", "generate master parameters and secret");
  pkg_setup_cmd->add_option("--level", o.level, "test or standard")->check(CLI::IsMember({"test", "standard"}));
  auto* pkg_extract_cmd = pkg->add_subcommand("extract", "extract a holder root key");
  pkg_extract_cmd->add_option("--root", o.root, "holder root identity")->required();
  pkg_extract_cmd->add_option("--out", o.out, "holder key file");

  auto* iss = app.add_subcommand("issuer", "issuer operations")->require_subcommand(1);
  auto* init_cmd = iss->add_subcommand("init", "create issuer state and day snapshots");
  init_cmd->add_option("--issuer-id", o.issuer_id, "issuer identifier");
  init_cmd->add_option("--params", o.in, "master public parameters file");
  init_cmd->add_option("--day", o.day, "first day index");
  init_cmd->add_option("--epoch", o.epoch, "unix time of day 0");
  init_cmd->add_option("--granularity", o.granularity, "seconds per day index");
  add_table_flags(init_cmd, o);
  auto* issue_cmd = iss->add_subcommand("issue", "issue a credential");
  issue_cmd->add_option("--root", o.root, "holder root identity")->required();
  issue_cmd->add_option("--pop-key", o.pop_key, "holder proof-of-possession key file")->required();
  issue_cmd->add_option("--expiry", o.expiry, "expiry day (N or +K)")->required();
  issue_cmd->add_option("--claims", o.claims, "claims as a JSON object");
  issue_cmd->add_option("--out", o.out, "issued credential file");
  auto* revoke_cmd = iss->add_subcommand("revoke", "publish a revocation document");
  revoke_cmd->add_option("--vc-id", o.vc_id, "credential id (hex)")->required();
  revoke_cmd->add_option("--status", o.status, "revoked, suspended or conditioned");
  revoke_cmd->add_option("--reason", o.reason, "free text");
  revoke_cmd->add_option("--constraints", o.constraints, "constraints as a JSON object");
  revoke_cmd->add_option("--effective-from", o.effective_from, "day the status takes effect");
  revoke_cmd->add_option("--sequence", o.sequence, "document sequence (0 assigns the next)");
  revoke_cmd->add_option("--day", o.day, "publication day (must be the current day)");
  auto* rollover_cmd = iss->add_subcommand("rollover", "advance to a later day");
  rollover_cmd->add_option("--day", o.day, "target day (N or +K)")->required();
  auto* serve_cmd = iss->add_subcommand("serve", "serve the published snapshots over HTTP");
  serve_cmd->add_option("--bind", o.bind, "host:port (port 0 picks one)");

  auto* hold = app.add_subcommand("holder", "wallet operations")->require_subcommand(1);
  auto* keygen_cmd = hold->add_subcommand("keygen", "generate a proof-of-possession key");
  keygen_cmd->add_option("--out", o.out, "key file");
  auto* store_cmd = hold->add_subcommand("store", "store an issued credential");
  store_cmd->add_option("--credential", o.credential, "issued credential file")->required();
  store_cmd->add_option("--holder-key", o.holder_key, "holder root key file")->required();
  store_cmd->add_option("--pop-key", o.pop_key, "proof-of-possession key file")->required();
  auto* present_cmd = hold->add_subcommand("present", "build a presentation");
  present_cmd->add_option("--vc-id", o.vc_id, "credential id (hex)")->required();
  present_cmd->add_option("--days", o.days, "comma-separated day indices")->required();
  present_cmd->add_option("--nonce", o.nonce, "verifier challenge (32 hex)")->required();
  present_cmd->add_option("--out", o.out, "presentation file");
  auto* audit_cmd = hold->add_subcommand("audit", "scan own bucket of a revocation snapshot");
  audit_cmd->add_option("--vc-id", o.vc_id, "credential id (hex)")->required();
  audit_cmd->add_option("--day", o.day, "day of the snapshot")->required();
  audit_cmd->add_option("--snapshot", o.snapshot, "revocation snapshot file")->required();
  audit_cmd->add_option("--params", o.in, "master public parameters file");

  auto* ver = app.add_subcommand("verifier", "verifier operations")->require_subcommand(1);
  auto* check_cmd = ver->add_subcommand("check", "check a presentation");
  check_cmd->add_option("--presentation", o.presentation, "presentation file")->required();
  check_cmd->add_option("--endpoint", o.endpoint, "publication server host:port");
  check_cmd->add_option("--from-dir", o.from_dir, "read an issuer directory instead of the network");
  check_cmd->add_option("--trust", o.in, "trust store file");
  check_cmd->add_option("--day", o.day, "current day (default from the wall clock)");
  check_cmd->add_option("--nonce", o.nonce, "expected challenge (32 hex)");

  auto* sim_cmd = app.add_subcommand("sim", "scenario simulator")->require_subcommand(1);
  auto* run_cmd = sim_cmd->add_subcommand("run", "run a seeded scenario");
  run_cmd->add_option("--config", o.config, "scenario config file (overrides the flags)");
  run_cmd->add_option("--holders", o.sim.holders);
  run_cmd->add_option("--vcs-per-holder", o.sim.vcs_per_holder);
  run_cmd->add_option("--days", o.sim.days);
  run_cmd->add_option("--revocation-rate", o.sim.daily_revocation_rate);
  run_cmd->add_option("--presentations-per-day", o.sim.presentations_per_day);
  run_cmd->add_option("--past-auth-probability", o.sim.past_auth_probability);
  run_cmd->add_option("--future-auth-probability", o.sim.future_auth_probability);
  run_cmd->add_option("--forgeries-per-day", o.sim.forgeries_per_day);
  run_cmd->add_option("--seed", o.sim.rng_seed);
  run_cmd->add_option("--scheme", o.sim_scheme, "test or standard")->check(CLI::IsMember({"test", "standard"}));
  run_cmd->add_option("--report", o.report, "canonical report file");
  add_table_flags(run_cmd, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::Error& e) {
    fail(Errc::usage, e.what());
    return static_cast<int>(Errc::usage);
  }

  try {
    if (pkg_setup_cmd->parsed()) pkg_setup(o);
    else if (pkg_extract_cmd->parsed()) pkg_extract(o);
    else if (init_cmd->parsed()) issuer_init(o);
    else if (issue_cmd->parsed()) issuer_issue(o);
    else if (revoke_cmd->parsed()) issuer_revoke(o);
    else if (rollover_cmd->parsed()) issuer_rollover(o);
    else if (serve_cmd->parsed()) issuer_serve(o);
    else if (keygen_cmd->parsed()) holder_keygen(o);
    else if (store_cmd->parsed()) holder_store(o);
    else if (present_cmd->parsed()) holder_present(o);
    else if (audit_cmd->parsed()) holder_audit(o);
    else if (check_cmd->parsed()) verifier_check(o);
    else if (run_cmd->parsed()) sim_run(o);
    return 0;
  } catch (const Error& e) {
    fail(e.code(), e.what());
    return static_cast<int>(e.code());
  } catch (const fs::filesystem_error& e) {
    fail(Errc::io, e.what());
    return static_cast<int>(Errc::io);
  } catch (const std::exception& e) {
    fail(Errc::io, e.what());
    return static_cast<int>(Errc::io);
  }
}
