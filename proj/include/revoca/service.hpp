#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "revoca/actors.hpp"
#include "revoca/ahibe.hpp"
#include "revoca/crypto.hpp"
#include "revoca/tables.hpp"

namespace httplib {
class Server;
}

// Read-only publication of an Issuer's per-day snapshots and the fetching
// client used by Verifiers.
namespace revoca::service {

struct PublicParamsDocument {
  ahibe::MasterPublicParams mpp;
  tables::TableParams table_params;
  std::uint64_t epoch = 0;  // unix seconds of day 0
  std::uint64_t granularity_seconds = 86400;
  std::string issuer_id;
  Signature signature;

  Bytes signed_bytes() const;
  bool verify(const VerifyKey& key) const;

  canonical::Value to_value() const;
  static PublicParamsDocument from_value(const canonical::Value& v);
};

PublicParamsDocument make_params_document(const ahibe::MasterPublicParams& mpp, const tables::TableParams& params,
                                          std::uint64_t epoch, std::uint64_t granularity_seconds,
                                          std::string issuer_id, const SigningKey& key);

Bytes encode(const PublicParamsDocument& doc);
PublicParamsDocument decode_params_document(ByteView b);  // throws Error(corrupt_snapshot)

// Endpoint grammar.
std::string params_path();
std::string segment_path(DayIndex day, std::uint64_t j);
std::string revocation_path(DayIndex day);

inline constexpr char kReasonHeader[] = "X-Revoca-Reason";
inline constexpr char kDayHeader[] = "X-Revoca-Day";

struct Response {
  int status = 200;
  Bytes body;
  std::map<std::string, std::string> headers;
};

// Raw published bytes, looked up by day.
class SnapshotStore {
 public:
  virtual ~SnapshotStore() = default;
  virtual std::optional<Bytes> params() const = 0;
  virtual std::optional<Bytes> check_table(DayIndex day) const = 0;
  virtual std::optional<Bytes> revocation_table(DayIndex day) const = 0;
};

class MemoryStore : public SnapshotStore {
 public:
  void put_params(Bytes doc);
  void put_day(const tables::CheckTableSnapshot& check, const tables::RevocationTableSnapshot& revocation);
  // Keeps only days >= first.
  void drop_before(DayIndex first);

  std::optional<Bytes> params() const override;
  std::optional<Bytes> check_table(DayIndex day) const override;
  std::optional<Bytes> revocation_table(DayIndex day) const override;

 private:
  mutable std::mutex mu_;
  std::optional<Bytes> params_;
  std::map<DayIndex, std::pair<Bytes, Bytes>> days_;
};

// An Issuer state directory: params.doc plus snapshots/ (see SnapshotArchive).
class DirectoryStore : public SnapshotStore {
 public:
  // Throws Error(io) if the directory or its params document is missing.
  explicit DirectoryStore(std::filesystem::path dir);

  std::optional<Bytes> params() const override;
  std::optional<Bytes> check_table(DayIndex day) const override;
  std::optional<Bytes> revocation_table(DayIndex day) const override;

  static std::filesystem::path params_file(const std::filesystem::path& dir) { return dir / "params.doc"; }
  static std::filesystem::path snapshot_dir(const std::filesystem::path& dir) { return dir / "snapshots"; }

 private:
  std::filesystem::path dir_;
};

// Answers GETs on the endpoint grammar from a store. Stateless apart from a
// cache of sliced segments keyed by the check table's content hash.
class Publisher {
 public:
  explicit Publisher(const SnapshotStore& store) : store_(&store) {}

  Response handle(std::string_view method, std::string_view path) const;

  // Every route the publisher answers, as patterns. None takes a
  // credential-dependent parameter.
  static std::vector<std::string> endpoints();

 private:
  Response segment(DayIndex day, std::uint64_t j) const;

  const SnapshotStore* store_;
  mutable std::mutex mu_;
  mutable std::map<std::pair<DayIndex, Sha256Digest>, std::vector<Bytes>> segments_;
};

class Transport {
 public:
  virtual ~Transport() = default;
  virtual Response get(const std::string& path) = 0;
};

class InProcessTransport : public Transport {
 public:
  explicit InProcessTransport(const Publisher& publisher) : publisher_(&publisher) {}
  Response get(const std::string& path) override { return publisher_->handle("GET", path); }

 private:
  const Publisher* publisher_;
};

class HttpTransport : public Transport {
 public:
  HttpTransport(std::string host, int port);
  Response get(const std::string& path) override;  // throws Error(io) when unreachable

 private:
  std::string host_;
  int port_;
};

// Every message that crossed a transport, in order.
struct WireRecord {
  std::string from;
  std::string method;
  std::string path;
  Bytes request_body;
  int status = 0;
  std::uint64_t response_bytes = 0;
};

class RecordingTransport : public Transport {
 public:
  RecordingTransport(Transport& inner, std::string label) : inner_(&inner), label_(std::move(label)) {}
  Response get(const std::string& path) override;
  const std::vector<WireRecord>& records() const { return records_; }
  void clear() { records_.clear(); }

 private:
  Transport* inner_;
  std::string label_;
  std::vector<WireRecord> records_;
};

struct FetchRecord {
  std::string path;
  std::uint64_t bytes = 0;
  std::optional<DayIndex> day;
  friend bool operator==(const FetchRecord&, const FetchRecord&) = default;
};

using FetchLog = std::vector<FetchRecord>;

// Verifier-side fetcher. Every body is logged with its exact size; parsed
// values are cached by content hash, bodies are not, so bandwidth accounting
// reflects one download per request.
class Client : public actors::TableSource {
 public:
  // With a trust store the params document's signature is checked.
  explicit Client(Transport& transport, const actors::TrustStore* trust = nullptr)
      : transport_(&transport), trust_(trust) {}

  // Throw Error(not_found), Error(corrupt_snapshot) or Error(bad_signature).
  PublicParamsDocument fetch_params();
  tables::CheckSegment fetch_segment(DayIndex day, std::uint64_t j);
  tables::RevocationTableSnapshot fetch_revocation_table(DayIndex day);

  const ahibe::MasterPublicParams& master_params() override;
  const tables::TableParams& table_params() override;
  std::optional<actors::Fetched<tables::CheckSegment>> check_segment(DayIndex day, std::uint64_t j) override;
  std::optional<actors::Fetched<tables::RevocationTableSnapshot>> revocation_table(DayIndex day) override;

  const FetchLog& log() const { return log_; }
  void clear_log();

 private:
  Bytes fetch(const std::string& path, std::optional<DayIndex> day);
  actors::Fetched<tables::CheckSegment> get_segment(DayIndex day, std::uint64_t j);
  actors::Fetched<tables::RevocationTableSnapshot> get_revocation_table(DayIndex day);
  const PublicParamsDocument& params_document();

  Transport* transport_;
  const actors::TrustStore* trust_;
  std::mutex mu_;
  FetchLog log_;
  std::optional<PublicParamsDocument> params_;
  std::map<Sha256Digest, std::shared_ptr<const tables::CheckSegment>> segment_cache_;
  std::map<Sha256Digest, std::shared_ptr<const tables::RevocationTableSnapshot>> table_cache_;
};

// HTTP/1.1 front end for a Publisher.
class HttpServer {
 public:
  explicit HttpServer(const Publisher& publisher);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Binds (port 0 picks a free one) and serves on a background thread.
  // Returns the bound port. Throws Error(io).
  int start(const std::string& host, int port);
  // Binds and blocks until stop().
  void run(const std::string& host, int port);
  void stop();

 private:
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
};

// Parses "host:port". Throws Error(usage).
std::pair<std::string, int> parse_bind_address(std::string_view address);

}  // namespace revoca::service
