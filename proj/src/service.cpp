#include "revoca/service.hpp"

#include <charconv>

#include "httplib.h"
#include "revoca/errors.hpp"

namespace revoca::service {

namespace fs = std::filesystem;
using canonical::Value;

// ---------------------------------------------------------------------------
// Params document

Bytes PublicParamsDocument::signed_bytes() const {
  Value v = to_value();
  v.erase("signature");
  return canonical::encode(v);
}

bool PublicParamsDocument::verify(const VerifyKey& key) const { return crypto::verify(key, signed_bytes(), signature); }

Value PublicParamsDocument::to_value() const {
  return {{"epoch", epoch},
          {"granularity_seconds", granularity_seconds},
          {"issuer_id", issuer_id},
          {"mpp", ahibe::to_value(mpp)},
          {"signature", to_base64url(signature.view())},
          {"table_params", table_params.to_value()}};
}

PublicParamsDocument PublicParamsDocument::from_value(const Value& v) {
  PublicParamsDocument doc;
  doc.mpp = ahibe::params_from_value(canonical::field(v, "mpp"));
  doc.table_params = tables::TableParams::from_value(canonical::field(v, "table_params"));
  doc.epoch = canonical::uint_field(v, "epoch");
  doc.granularity_seconds = canonical::uint_field(v, "granularity_seconds");
  if (doc.granularity_seconds == 0) throw Error(Errc::decode, "granularity must be positive");
  doc.issuer_id = canonical::text_field(v, "issuer_id");
  doc.signature = canonical::fixed_field<Signature>(v, "signature");
  return doc;
}

PublicParamsDocument make_params_document(const ahibe::MasterPublicParams& mpp, const tables::TableParams& params,
                                          std::uint64_t epoch, std::uint64_t granularity_seconds,
                                          std::string issuer_id, const SigningKey& key) {
  if (granularity_seconds == 0) throw Error(Errc::parameter, "granularity must be positive");
  params.validate();
  PublicParamsDocument doc{mpp, params, epoch, granularity_seconds, std::move(issuer_id), {}};
  doc.signature = crypto::sign(key, doc.signed_bytes());
  return doc;
}

Bytes encode(const PublicParamsDocument& doc) { return canonical::encode(doc.to_value()); }

PublicParamsDocument decode_params_document(ByteView b) {
  try {
    return PublicParamsDocument::from_value(canonical::decode(b));
  } catch (const Error& e) {
    throw Error(Errc::corrupt_snapshot, e.what());
  }
}

std::string params_path() { return "/v1/params"; }

std::string segment_path(DayIndex day, std::uint64_t j) {
  return "/v1/days/" + std::to_string(day.value) + "/check/segments/" + std::to_string(j);
}

std::string revocation_path(DayIndex day) { return "/v1/days/" + std::to_string(day.value) + "/revocation"; }

// ---------------------------------------------------------------------------
// Stores

void MemoryStore::put_params(Bytes doc) {
  std::lock_guard lock(mu_);
  params_ = std::move(doc);
}

void MemoryStore::put_day(const tables::CheckTableSnapshot& check, const tables::RevocationTableSnapshot& revocation) {
  if (check.day != revocation.day) throw Error(Errc::parameter, "snapshot days differ");
  auto pair = std::make_pair(tables::encode(check), tables::encode(revocation));
  std::lock_guard lock(mu_);
  days_.insert_or_assign(check.day, std::move(pair));
}

void MemoryStore::drop_before(DayIndex first) {
  std::lock_guard lock(mu_);
  days_.erase(days_.begin(), days_.lower_bound(first));
}

std::optional<Bytes> MemoryStore::params() const {
  std::lock_guard lock(mu_);
  return params_;
}

std::optional<Bytes> MemoryStore::check_table(DayIndex day) const {
  std::lock_guard lock(mu_);
  auto it = days_.find(day);
  if (it == days_.end()) return std::nullopt;
  return it->second.first;
}

std::optional<Bytes> MemoryStore::revocation_table(DayIndex day) const {
  std::lock_guard lock(mu_);
  auto it = days_.find(day);
  if (it == days_.end()) return std::nullopt;
  return it->second.second;
}

DirectoryStore::DirectoryStore(fs::path dir) : dir_(std::move(dir)) {
  if (!fs::is_directory(dir_)) throw Error(Errc::io, "state directory " + dir_.string() + " does not exist");
  if (!fs::exists(params_file(dir_))) throw Error(Errc::io, "no params document in " + dir_.string());
}

namespace {

std::optional<Bytes> read_if_exists(const fs::path& path) {
  if (!fs::exists(path)) return std::nullopt;
  try {
    return tables::read_file(path);
  } catch (const Error&) {
    // Pruned between the existence check and the read.
    return std::nullopt;
  }
}

}  // namespace

std::optional<Bytes> DirectoryStore::params() const { return read_if_exists(params_file(dir_)); }

std::optional<Bytes> DirectoryStore::check_table(DayIndex day) const {
  return read_if_exists(snapshot_dir(dir_) / tables::check_snapshot_name(day));
}

std::optional<Bytes> DirectoryStore::revocation_table(DayIndex day) const {
  return read_if_exists(snapshot_dir(dir_) / tables::revocation_snapshot_name(day));
}

// ---------------------------------------------------------------------------
// Publisher

namespace {

Response not_found(std::string reason) {
  Response r;
  r.status = 404;
  r.headers[kReasonHeader] = std::move(reason);
  return r;
}

Response ok(Bytes body, std::optional<DayIndex> day) {
  Response r;
  r.body = std::move(body);
  if (day) r.headers[kDayHeader] = std::to_string(day->value);
  return r;
}

// Canonical decimal only, so that each resource has exactly one path.
std::optional<std::uint64_t> parse_decimal(std::string_view s) {
  if (s.empty() || (s.size() > 1 && s[0] == '0')) return std::nullopt;
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
  return v;
}

std::vector<std::string_view> split_path(std::string_view path) {
  std::vector<std::string_view> parts;
  if (path.empty() || path[0] != '/') return parts;
  path.remove_prefix(1);
  while (true) {
    auto slash = path.find('/');
    parts.push_back(path.substr(0, slash));
    if (slash == std::string_view::npos) break;
    path.remove_prefix(slash + 1);
  }
  return parts;
}

}  // namespace

std::vector<std::string> Publisher::endpoints() {
  return {"GET /v1/params", "GET /v1/days/{day}/check/segments/{j}", "GET /v1/days/{day}/revocation"};
}

Response Publisher::handle(std::string_view method, std::string_view path) const {
  if (method != "GET") {
    Response r;
    r.status = 405;
    r.headers[kReasonHeader] = "method-not-allowed";
    return r;
  }
  auto parts = split_path(path);
  if (parts.size() == 2 && parts[0] == "v1" && parts[1] == "params") {
    auto body = store_->params();
    if (!body) return not_found("params-unavailable");
    return ok(std::move(*body), std::nullopt);
  }
  if (parts.size() >= 4 && parts[0] == "v1" && parts[1] == "days") {
    auto day = parse_decimal(parts[2]);
    if (!day) return not_found("unknown-endpoint");
    if (parts.size() == 4 && parts[3] == "revocation") {
      auto body = store_->revocation_table(DayIndex{*day});
      if (!body) return not_found("day-not-archived");
      return ok(std::move(*body), DayIndex{*day});
    }
    if (parts.size() == 6 && parts[3] == "check" && parts[4] == "segments") {
      auto j = parse_decimal(parts[5]);
      if (!j) return not_found("unknown-endpoint");
      return segment(DayIndex{*day}, *j);
    }
  }
  return not_found("unknown-endpoint");
}

Response Publisher::segment(DayIndex day, std::uint64_t j) const {
  auto body = store_->check_table(day);
  if (!body) return not_found("day-not-archived");
  const std::pair key{day, crypto::sha256(*body)};
  {
    std::lock_guard lock(mu_);
    auto it = segments_.find(key);
    if (it != segments_.end()) {
      if (j >= it->second.size()) return not_found("segment-out-of-range");
      return ok(it->second[j], day);
    }
  }
  const auto table = tables::decode_check_table(*body);
  std::vector<Bytes> slices;
  for (std::uint64_t i = 0; i < table.params.sigma; ++i) slices.push_back(tables::encode(tables::segment_of(table, i)));
  std::lock_guard lock(mu_);
  // Older versions of the same day are superseded.
  for (auto it = segments_.begin(); it != segments_.end();)
    it = it->first.first == day ? segments_.erase(it) : std::next(it);
  auto& stored = segments_[key] = std::move(slices);
  if (j >= stored.size()) return not_found("segment-out-of-range");
  return ok(stored[j], day);
}

// ---------------------------------------------------------------------------
// Transports

HttpTransport::HttpTransport(std::string host, int port) : host_(std::move(host)), port_(port) {}

Response HttpTransport::get(const std::string& path) {
  httplib::Client client(host_, port_);
  client.set_keep_alive(false);
  auto res = client.Get(path);
  if (!res) throw Error(Errc::io, "cannot reach " + host_ + ":" + std::to_string(port_) + " (" +
                                      httplib::to_string(res.error()) + ")");
  Response r;
  r.status = res->status;
  r.body = to_bytes(res->body);
  for (const char* name : {kReasonHeader, kDayHeader})
    if (res->has_header(name)) r.headers[name] = res->get_header_value(name);
  return r;
}

Response RecordingTransport::get(const std::string& path) {
  auto r = inner_->get(path);
  records_.push_back({label_, "GET", path, {}, r.status, r.body.size()});
  return r;
}

// ---------------------------------------------------------------------------
// Client

Bytes Client::fetch(const std::string& path, std::optional<DayIndex> day) {
  auto r = transport_->get(path);
  {
    std::lock_guard lock(mu_);
    log_.push_back({path, r.body.size(), day});
  }
  if (r.status == 404) {
    auto it = r.headers.find(kReasonHeader);
    throw Error(Errc::not_found, path + ": " + (it == r.headers.end() ? "not found" : it->second));
  }
  if (r.status != 200) throw Error(Errc::io, path + ": status " + std::to_string(r.status));
  return std::move(r.body);
}

void Client::clear_log() {
  std::lock_guard lock(mu_);
  log_.clear();
}

PublicParamsDocument Client::fetch_params() {
  auto doc = decode_params_document(fetch(params_path(), std::nullopt));
  if (trust_) {
    auto key = trust_->find(doc.issuer_id);
    if (!key || !doc.verify(*key)) throw Error(Errc::bad_signature, "params document signature does not verify");
  }
  return doc;
}

actors::Fetched<tables::CheckSegment> Client::get_segment(DayIndex day, std::uint64_t j) {
  auto body = fetch(segment_path(day, j), day);
  const auto hash = crypto::sha256(body);
  {
    std::lock_guard lock(mu_);
    if (auto it = segment_cache_.find(hash); it != segment_cache_.end()) return {*it->second, body.size()};
  }
  auto seg = std::make_shared<const tables::CheckSegment>(tables::decode_check_segment(body));
  if (seg->day != day || seg->segment_index != j) throw Error(Errc::corrupt_snapshot, "segment answers another request");
  std::lock_guard lock(mu_);
  segment_cache_.emplace(hash, seg);
  return {*seg, body.size()};
}

actors::Fetched<tables::RevocationTableSnapshot> Client::get_revocation_table(DayIndex day) {
  auto body = fetch(revocation_path(day), day);
  const auto hash = crypto::sha256(body);
  {
    std::lock_guard lock(mu_);
    if (auto it = table_cache_.find(hash); it != table_cache_.end()) return {*it->second, body.size()};
  }
  auto table = std::make_shared<const tables::RevocationTableSnapshot>(tables::decode_revocation_table(body));
  if (table->day != day) throw Error(Errc::corrupt_snapshot, "revocation table answers another request");
  std::lock_guard lock(mu_);
  table_cache_.emplace(hash, table);
  return {*table, body.size()};
}

tables::CheckSegment Client::fetch_segment(DayIndex day, std::uint64_t j) { return get_segment(day, j).value; }

tables::RevocationTableSnapshot Client::fetch_revocation_table(DayIndex day) {
  return get_revocation_table(day).value;
}

const PublicParamsDocument& Client::params_document() {
  {
    std::lock_guard lock(mu_);
    if (params_) return *params_;
  }
  auto doc = fetch_params();
  std::lock_guard lock(mu_);
  if (!params_) params_ = std::move(doc);
  return *params_;
}

const ahibe::MasterPublicParams& Client::master_params() { return params_document().mpp; }

const tables::TableParams& Client::table_params() { return params_document().table_params; }

std::optional<actors::Fetched<tables::CheckSegment>> Client::check_segment(DayIndex day, std::uint64_t j) {
  try {
    return get_segment(day, j);
  } catch (const Error& e) {
    if (e.code() == Errc::not_found) return std::nullopt;
    throw;
  }
}

std::optional<actors::Fetched<tables::RevocationTableSnapshot>> Client::revocation_table(DayIndex day) {
  try {
    return get_revocation_table(day);
  } catch (const Error& e) {
    if (e.code() == Errc::not_found) return std::nullopt;
    throw;
  }
}

// ---------------------------------------------------------------------------
// HTTP server

HttpServer::HttpServer(const Publisher& publisher) : server_(std::make_unique<httplib::Server>()) {
  auto handler = [&publisher](const httplib::Request& req, httplib::Response& res) {
    auto r = publisher.handle(req.method, req.path);
    res.status = r.status;
    for (const auto& [k, v] : r.headers) res.set_header(k, v);
    res.set_content(std::string(r.body.begin(), r.body.end()), "application/json");
  };
  server_->Get(".*", handler);
  server_->Post(".*", handler);
  server_->Put(".*", handler);
  server_->Delete(".*", handler);
  server_->Patch(".*", handler);
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = server_->bind_to_any_port(host);
    if (bound < 0) throw Error(Errc::io, "cannot bind " + host);
  } else if (!server_->bind_to_port(host, port)) {
    throw Error(Errc::io, "cannot bind " + host + ":" + std::to_string(port));
  }
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return bound;
}

void HttpServer::run(const std::string& host, int port) {
  if (!server_->bind_to_port(host, port)) throw Error(Errc::io, "cannot bind " + host + ":" + std::to_string(port));
  server_->listen_after_bind();
}

void HttpServer::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

std::pair<std::string, int> parse_bind_address(std::string_view address) {
  auto colon = address.rfind(':');
  if (colon == std::string_view::npos || colon == 0) throw Error(Errc::usage, "bind address must be host:port");
  auto port = parse_decimal(address.substr(colon + 1));
  if (!port || *port > 65535) throw Error(Errc::usage, "bad port in bind address");
  return {std::string(address.substr(0, colon)), static_cast<int>(*port)};
}

}  // namespace revoca::service
