#include <gtest/gtest.h>

#include <sys/stat.h>
#include <sys/wait.h>

#include <chrono>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "revoca/canonical.hpp"
#include "revoca/tables.hpp"

using namespace revoca;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
  canonical::Value json() const { return canonical::Value::parse(out); }
  canonical::Value error() const { return canonical::Value::parse(err); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return q + "'";
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("revoca-cli-" + std::to_string(::getpid()) + "-" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  CliResult run(const std::string& args, const std::string& env = "") {
    const auto out = dir_ / "stdout", err = dir_ / "stderr";
    const std::string cmd = env + " " + quote(REVOCA_CLI) + " --state-dir " + quote(state().string()) + " " + args +
                            " >" + quote(out.string()) + " 2>" + quote(err.string());
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
  }

  CliResult ok(const std::string& args) {
    auto r = run(args);
    EXPECT_EQ(r.code, 0) << args << "\n" << r.err;
    return r;
  }

  fs::path state() const { return dir_ / "state"; }
  fs::path file(const std::string& name) const { return dir_ / name; }

  // setup -> extract -> init -> keygen -> issue -> store; returns the vc id.
  std::string issued_credential(const std::string& init_flags = "--day 100") {
    ok("pkg setup");
    ok("pkg extract --root alice");
    ok("issuer init --issuer-id acme " + init_flags + " --d 64 --c 64 --sigma 2 --min-anonymity 1");
    ok("holder keygen");
    const canonical::Value issued = ok("issuer issue --root alice --pop-key " + quote((state() / "holder/pop.key").string()) +
                           " --expiry +30 --claims '{\"degree\":\"MSc\"}' --out " + quote(file("alice.cred").string()))
                            .json();
    ok("holder store --credential " + quote(file("alice.cred").string()) + " --holder-key " +
       quote((state() / "holder/alice.hkey").string()) + " --pop-key " +
       quote((state() / "holder/pop.key").string()));
    return issued.at("vc_id").get<std::string>();
  }

  std::string present(const std::string& vc, const std::string& days, const std::string& name = "p.pres") {
    ok("holder present --vc-id " + vc + " --days " + days + " --nonce 000102030405060708090a0b0c0d0e0f --out " +
       quote(file(name).string()));
    return file(name).string();
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, HappyPathThenRevocation) {
  const auto vc = issued_credential();
  auto check = ok("verifier check --day 100 --presentation " + quote(present(vc, "100"))).json();
  EXPECT_EQ(check.at("days").at(0).at("verdict"), "NoRevocationFound");
  EXPECT_EQ(check.at("revoked"), false);
  EXPECT_GT(check.at("segment_bytes").get<std::uint64_t>(), 0u);

  const auto revoked = ok("issuer revoke --vc-id " + vc + " --status suspended --reason 'lost wallet'").json();
  EXPECT_LT(revoked.at("bucket").get<std::uint64_t>(), 64u);
  check = ok("verifier check --day 100 --nonce 000102030405060708090a0b0c0d0e0f --presentation " +
             quote(present(vc, "100,101")))
              .json();
  EXPECT_EQ(check.at("days").at(0).at("verdict"), "Revoked");
  EXPECT_EQ(check.at("days").at(0).at("documents").at(0).at("status"), "suspended");
  EXPECT_EQ(check.at("days").at(1).at("verdict"), "DeferredFutureDay");

  const auto audit = ok("holder audit --vc-id " + vc + " --day 100 --snapshot " +
                        quote((state() / "issuer/snapshots/revocation-100.snap").string()))
                         .json();
  EXPECT_EQ(audit.at("documents").size(), 1u);

  ok("issuer rollover --day +1");
  check = ok("verifier check --day 101 --presentation " + quote(present(vc, "100,101"))).json();
  EXPECT_EQ(check.at("days").at(0).at("verdict"), "Revoked");
  EXPECT_EQ(check.at("days").at(1).at("verdict"), "Revoked");
}

TEST_F(Cli, TamperedPresentationIsBadProofOfPossession) {
  const auto vc = issued_credential();
  const auto path = present(vc, "100");
  auto v = canonical::decode(to_bytes(slurp(path)));
  auto nonce = from_base64url(v["nonce"].get<std::string>());
  nonce[0] ^= 1;
  v["nonce"] = to_base64url(nonce);
  std::ofstream(path, std::ios::trunc) << canonical::encode_text(v);
  const auto r = run("verifier check --day 100 --presentation " + quote(path));
  EXPECT_EQ(r.code, 31);
  EXPECT_EQ(r.error().at("error"), "BadProofOfPossession");
  EXPECT_EQ(r.error().at("message").get<std::string>().rfind("BadProofOfPossession", 0), std::string::npos);

  const auto wrong_nonce =
      run("verifier check --day 100 --nonce ffffffffffffffffffffffffffffffff --presentation " + quote(present(vc, "100")));
  EXPECT_EQ(wrong_nonce.code, 31);

  auto forged = canonical::decode(to_bytes(slurp(present(vc, "100"))));
  forged["authorizations"][0]["day_token"] = to_base64url(Bytes(32, 7));
  std::ofstream(file("forged.pres"), std::ios::trunc) << canonical::encode_text(forged);
  const auto f = run("verifier check --day 100 --presentation " + quote(file("forged.pres").string()));
  EXPECT_EQ(f.code, 33);
  EXPECT_EQ(f.error().at("error"), "CheckDigestNotFound");
}

TEST_F(Cli, InitThenRolloverLeavesTwoSnapshotPairs) {
  ok("pkg setup");
  ok("issuer init --day 7");
  const auto r = ok("issuer rollover --day +1").json();
  EXPECT_EQ(r.at("day"), 8);
  std::set<std::string> names;
  for (const auto& e : fs::directory_iterator(state() / "issuer/snapshots")) names.insert(e.path().filename().string());
  EXPECT_EQ(names, (std::set<std::string>{"check-7.snap", "revocation-7.snap", "check-8.snap", "revocation-8.snap"}));
  EXPECT_EQ(tables::read_check_snapshot(state() / "issuer/snapshots/check-8.snap").digest_count(), 0u);

  const auto back = run("issuer rollover --day 3");
  EXPECT_EQ(back.code, 18);
  EXPECT_EQ(back.error().at("error"), "Parameter");
  EXPECT_EQ(run("issuer init --day 7").code, 21);
}

TEST_F(Cli, UsageErrorsAndSecretFiles) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("pkg frobnicate").code, 2);
  EXPECT_EQ(run("holder present --vc-id 00").code, 2);
  const auto missing = run("issuer issue --root a --pop-key /nonexistent --expiry 3");
  EXPECT_EQ(missing.code, 3);
  EXPECT_EQ(missing.error().at("error"), "Io");

  issued_credential();
  for (const char* secret : {"pkg/msk.secret", "holder/wallet.store", "holder/alice.hkey", "holder/pop.key",
                             "issuer/issuer.state"}) {
    struct stat st {};
    ASSERT_EQ(::stat((state() / secret).c_str(), &st), 0) << secret;
    EXPECT_EQ(st.st_mode & 0777, 0600u) << secret;
  }
  const auto bad_nonce = run("holder present --vc-id " + std::string(32, 'a') + " --days 100 --nonce xyz");
  EXPECT_EQ(bad_nonce.code, 2);
  EXPECT_EQ(run("holder present --vc-id 00 --days 100 --nonce " + std::string(32, '0')).code, 10);
}

TEST_F(Cli, StateDirFromEnvironment) {
  const auto env_state = dir_ / "env-state";
  const std::string cmd = "REVOCA_STATE_DIR=" + quote(env_state.string()) + " " + quote(REVOCA_CLI) +
                          " pkg setup >/dev/null 2>&1";
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  EXPECT_TRUE(fs::exists(env_state / "pkg/mpp.params"));
  EXPECT_TRUE(fs::exists(env_state / "pkg/msk.secret"));
}

TEST_F(Cli, ServeOverHttp) {
  const auto vc = issued_credential();
  ok("issuer revoke --vc-id " + vc);
  const auto log = file("serve.out");
  const std::string cmd = quote(REVOCA_CLI) + " --state-dir " + quote(state().string()) +
                          " issuer serve --bind 127.0.0.1:0 >" + quote(log.string()) + " 2>&1 & echo $!";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  ASSERT_NE(pipe, nullptr);
  int pid = 0;
  ASSERT_EQ(std::fscanf(pipe, "%d", &pid), 1);
  ::pclose(pipe);

  std::string listening;
  for (int i = 0; i < 100 && listening.empty(); ++i) {
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
    const auto text = slurp(log);
    if (text.find('\n') != std::string::npos) listening = canonical::Value::parse(text).at("listening");
  }
  ASSERT_FALSE(listening.empty()) << slurp(log);

  const auto r = ok("verifier check --day 100 --endpoint http://" + listening + "/ --presentation " +
                    quote(present(vc, "100")) + " --trust " + quote((state() / "verifier/trust.store").string()));
  EXPECT_EQ(r.json().at("days").at(0).at("verdict"), "Revoked");
  const auto early = ok("verifier check --day 99 --endpoint " + listening + " --presentation " +
                        quote(present(vc, "100")));
  EXPECT_EQ(early.json().at("days").at(0).at("verdict"), "DeferredFutureDay");

  ::kill(pid, SIGTERM);
  for (int i = 0; i < 100 && ::kill(pid, 0) == 0; ++i) std::this_thread::sleep_for(std::chrono::milliseconds(20));
  EXPECT_NE(::kill(pid, 0), 0);
  const auto gone = run("verifier check --day 100 --endpoint " + listening + " --presentation " +
                        quote(present(vc, "100")));
  EXPECT_EQ(gone.code, 3);
}

TEST_F(Cli, SimRunWritesReportAndTable) {
  const auto r = ok("sim run --holders 10 --days 3 --presentations-per-day 10 --forgeries-per-day 4 --d 32 --c 32 "
                    "--sigma 2 --min-anonymity 1 --report " +
                    quote(file("r.rep").string()));
  EXPECT_NE(r.out.find("total"), std::string::npos);
  const auto report = canonical::decode(to_bytes(slurp(file("r.rep"))));
  EXPECT_EQ(report.at("total").at("false_positives"), 0);
  EXPECT_EQ(report.at("total").at("forged_rejected"), 12);
  // the same config twice gives the same bytes
  ok("sim run --holders 10 --days 3 --presentations-per-day 10 --forgeries-per-day 4 --d 32 --c 32 --sigma 2 "
     "--min-anonymity 1 --report " +
     quote(file("r2.rep").string()));
  EXPECT_EQ(slurp(file("r.rep")), slurp(file("r2.rep")));
  EXPECT_EQ(run("sim run --holders 0").code, 18);
}
