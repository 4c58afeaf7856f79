#include "andor/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

namespace andor::io {

namespace {

constexpr std::string_view kSeparator = "---\n";

std::string join_ints(std::span<const int> xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(xs[i]);
  }
  return out;
}

void append_doubles(std::string& out, std::span<const double> xs, Encoding encoding) {
  if (encoding == Encoding::text) {
    for (double x : xs) {
      out += format_double(x);
      out += '\n';
    }
    return;
  }
  const std::size_t start = out.size();
  out.resize(start + xs.size() * sizeof(double));
  char* dst = out.data() + start;
  for (double x : xs) {
    auto bits = std::bit_cast<std::uint64_t>(x);
    for (int b = 0; b < 8; ++b) *dst++ = static_cast<char>((bits >> (8 * b)) & 0xff);
  }
}

/// Parsed "key value" header; remembers which keys were consumed.
class Header {
 public:
  Header(std::string_view bytes, std::string_view magic, int version, const std::string& source)
      : source_(source) {
    const auto sep = bytes.find(std::string("\n") + std::string(kSeparator));
    if (sep == std::string_view::npos) fail("missing header terminator");
    payload_ = bytes.substr(sep + 1 + kSeparator.size());
    std::string_view head = bytes.substr(0, sep + 1);
    bool first = true;
    while (!head.empty()) {
      const auto eol = head.find('\n');
      std::string_view line = head.substr(0, eol);
      head.remove_prefix(eol + 1);
      const auto sp = line.find(' ');
      std::string key(line.substr(0, sp));
      std::string value = sp == std::string_view::npos ? "" : std::string(line.substr(sp + 1));
      if (first) {
        if (key != magic) fail("not a " + std::string(magic) + " file");
        if (value != std::to_string(version)) fail("unsupported format version '" + value + "'");
        first = false;
        continue;
      }
      if (!fields_.emplace(key, value).second) fail("duplicate header field '" + key + "'");
    }
    if (first) fail("empty header");
  }

  const std::string& get(const std::string& key) {
    auto it = fields_.find(key);
    if (it == fields_.end()) fail("missing header field '" + key + "'");
    used_.insert(key);
    return it->second;
  }

  long long get_int(const std::string& key) {
    const std::string& v = get(key);
    long long x = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || p != v.data() + v.size()) fail("field '" + key + "' is not an integer");
    return x;
  }

  double get_double(const std::string& key) {
    const std::string& v = get(key);
    double x = 0.0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || p != v.data() + v.size()) fail("field '" + key + "' is not a number");
    return x;
  }

  bool get_flag(const std::string& key) {
    const auto x = get_int(key);
    if (x != 0 && x != 1) fail("field '" + key + "' must be 0 or 1");
    return x == 1;
  }

  std::vector<int> get_ints(const std::string& key) {
    std::vector<int> out;
    std::istringstream in(get(key));
    std::string tok;
    while (in >> tok) {
      int x = 0;
      auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), x);
      if (ec != std::errc() || p != tok.data() + tok.size()) fail("field '" + key + "' holds a non-integer");
      out.push_back(x);
    }
    return out;
  }

  Encoding encoding() {
    const std::string& e = get("encoding");
    if (e == "binary") return Encoding::binary;
    if (e == "text") return Encoding::text;
    fail("unknown encoding '" + e + "'");
  }

  /// Reads `blocks` payload arrays of `length` doubles each.
  std::vector<std::vector<double>> payload(Encoding encoding, std::size_t blocks, std::size_t length) {
    for (const auto& [k, v] : fields_) {
      if (!used_.count(k)) fail("unknown header field '" + k + "'");
    }
    std::vector<std::vector<double>> out(blocks, std::vector<double>(length));
    if (encoding == Encoding::binary) {
      const std::size_t want = blocks * length * sizeof(double);
      if (payload_.size() != want) {
        fail("payload holds " + std::to_string(payload_.size()) + " bytes, expected " + std::to_string(want));
      }
      const auto* src = reinterpret_cast<const unsigned char*>(payload_.data());
      for (auto& block : out) {
        for (double& x : block) {
          std::uint64_t bits = 0;
          for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(*src++) << (8 * b);
          x = std::bit_cast<double>(bits);
        }
      }
      return out;
    }
    std::string_view rest = payload_;
    std::size_t count = 0;
    for (auto& block : out) {
      for (double& x : block) {
        const auto eol = rest.find('\n');
        if (eol == std::string_view::npos) {
          fail("payload holds " + std::to_string(count) + " values, expected " + std::to_string(blocks * length));
        }
        const std::string_view tok = rest.substr(0, eol);
        auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), x);
        if (ec != std::errc() || p != tok.data() + tok.size()) {
          fail("payload value " + std::to_string(count) + " is not a number");
        }
        rest.remove_prefix(eol + 1);
        ++count;
      }
    }
    if (!rest.empty()) fail("payload has trailing data after " + std::to_string(count) + " values");
    return out;
  }

  [[noreturn]] void fail(const std::string& message) const { throw FormatError(source_, message); }

 private:
  std::string source_;
  std::map<std::string, std::string> fields_;
  std::set<std::string> used_;
  std::string_view payload_;
};

void write_meta(std::string& out, int n, const TableMeta& meta) {
  out += "n " + std::to_string(n) + "\n";
  out += "variables " + join_ints(meta.variable_ids) + "\n";
  out += "mask_convention " + std::string(kMaskConvention) + "\n";
  out += "score " + meta.score_tag + "\n";
  out += "baseline " + meta.baseline_tag + "\n";
  out += "sample " + meta.sample_id + "\n";
  out += "epoch " + std::to_string(meta.epoch) + "\n";
}

std::pair<int, TableMeta> read_meta(Header& h) {
  const auto n = h.get_int("n");
  if (n < 0 || n > kMaxVariables) h.fail("n = " + std::to_string(n) + " outside [0, " + std::to_string(kMaxVariables) + "]");
  TableMeta meta;
  meta.variable_ids = h.get_ints("variables");
  if (!meta.variable_ids.empty() && meta.variable_ids.size() != static_cast<std::size_t>(n)) {
    h.fail("variables lists " + std::to_string(meta.variable_ids.size()) + " ids for n = " + std::to_string(n));
  }
  if (h.get("mask_convention") != kMaskConvention) h.fail("unsupported mask convention");
  meta.score_tag = h.get("score");
  meta.baseline_tag = h.get("baseline");
  meta.sample_id = h.get("sample");
  meta.epoch = static_cast<int>(h.get_int("epoch"));
  return {static_cast<int>(n), meta};
}

const char* encoding_name(Encoding e) { return e == Encoding::binary ? "binary" : "text"; }

}  // namespace

std::string format_double(double x) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, p);
}

std::string encode_table(const MaskedOutputTable& table, Encoding encoding) {
  std::string out = "ANDOR-TABLE " + std::to_string(kTableFormatVersion) + "\n";
  write_meta(out, table.n(), table.meta());
  out += std::string("encoding ") + encoding_name(encoding) + "\n";
  out += kSeparator;
  append_doubles(out, table.values().span(), encoding);
  return out;
}

MaskedOutputTable decode_table(std::string_view bytes, const std::string& source) {
  Header h(bytes, "ANDOR-TABLE", kTableFormatVersion, source);
  auto [n, meta] = read_meta(h);
  const auto enc = h.encoding();
  auto blocks = h.payload(enc, 1, lattice_size(n));
  try {
    return MaskedOutputTable(n, std::move(blocks[0]), std::move(meta));
  } catch (const std::exception& e) {
    h.fail(e.what());
  }
}

std::string encode_spectrum(const InteractionSpectrum& s, Encoding encoding) {
  std::string out = "ANDOR-SPECTRUM " + std::to_string(kSpectrumFormatVersion) + "\n";
  write_meta(out, s.n, s.source_meta.table);
  const auto& tr = s.source_meta.trace;
  out += "v_empty " + format_double(s.v_empty) + "\n";
  out += "bound_ratio " + format_double(s.split.bound_ratio) + "\n";
  out += "optimized " + std::to_string(s.source_meta.optimized ? 1 : 0) + "\n";
  out += "method " + to_string(tr.method) + "\n";
  out += "iterations " + std::to_string(tr.iterations) + "\n";
  out += "converged " + std::to_string(tr.converged ? 1 : 0) + "\n";
  out += "initial_objective " + format_double(tr.initial_objective) + "\n";
  out += "final_objective " + format_double(tr.final_objective) + "\n";
  out += "lower_bound " + format_double(tr.lower_bound) + "\n";
  out += std::string("encoding ") + encoding_name(encoding) + "\n";
  out += "payloads and or gamma\n";
  out += kSeparator;
  append_doubles(out, s.i_and.span(), encoding);
  append_doubles(out, s.i_or.span(), encoding);
  append_doubles(out, s.split.gamma.span(), encoding);
  return out;
}

InteractionSpectrum decode_spectrum(std::string_view bytes, const std::string& source) {
  Header h(bytes, "ANDOR-SPECTRUM", kSpectrumFormatVersion, source);
  auto [n, meta] = read_meta(h);
  InteractionSpectrum s;
  s.n = n;
  s.source_meta.table = std::move(meta);
  s.v_empty = h.get_double("v_empty");
  s.split.bound_ratio = h.get_double("bound_ratio");
  s.source_meta.optimized = h.get_flag("optimized");
  auto& tr = s.source_meta.trace;
  try {
    tr.method = parse_sparsify_method(h.get("method"));
  } catch (const std::exception& e) {
    h.fail(e.what());
  }
  tr.iterations = static_cast<int>(h.get_int("iterations"));
  tr.converged = h.get_flag("converged");
  tr.initial_objective = h.get_double("initial_objective");
  tr.final_objective = h.get_double("final_objective");
  tr.lower_bound = h.get_double("lower_bound");
  if (h.get("payloads") != "and or gamma") h.fail("unexpected payload layout");
  const auto enc = h.encoding();
  auto blocks = h.payload(enc, 3, lattice_size(n));
  try {
    s.i_and = LatticeVector(n, std::move(blocks[0]));
    s.i_or = LatticeVector(n, std::move(blocks[1]));
    s.split.gamma = LatticeVector(n, std::move(blocks[2]));
  } catch (const std::exception& e) {
    h.fail(e.what());
  }
  return s;
}

std::string encode_checkpoint(const CheckpointBlob& blob) {
  std::string out = "ANDOR-CHECKPOINT " + std::to_string(kCheckpointFormatVersion) + "\n";
  out += "inputs " + std::to_string(blob.shape.inputs) + "\n";
  out += "hidden " + join_ints(blob.shape.hidden) + "\n";
  out += "outputs " + std::to_string(blob.shape.outputs) + "\n";
  out += "epoch " + std::to_string(blob.epoch) + "\n";
  out += "parameters " + std::to_string(blob.parameters.size()) + "\n";
  out += "encoding binary\n";
  out += kSeparator;
  append_doubles(out, blob.parameters, Encoding::binary);
  return out;
}

CheckpointBlob decode_checkpoint(std::string_view bytes, const std::string& source) {
  Header h(bytes, "ANDOR-CHECKPOINT", kCheckpointFormatVersion, source);
  CheckpointBlob blob;
  blob.shape.inputs = static_cast<int>(h.get_int("inputs"));
  blob.shape.hidden = h.get_ints("hidden");
  blob.shape.outputs = static_cast<int>(h.get_int("outputs"));
  blob.epoch = static_cast<int>(h.get_int("epoch"));
  const auto count = h.get_int("parameters");
  if (count < 0) h.fail("negative parameter count");
  const auto enc = h.encoding();
  auto blocks = h.payload(enc, 1, static_cast<std::size_t>(count));
  blob.parameters = std::move(blocks[0]);
  try {
    toy::ToyNetwork check(blob.shape, blob.parameters);
  } catch (const std::exception& e) {
    h.fail(e.what());
  }
  return blob;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path.string() + ": cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const fs::path& path, std::string_view bytes) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(tmp.string() + ": cannot open for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error(tmp.string() + ": write failed");
  }
  fs::rename(tmp, path);
}

void write_table(const fs::path& path, const MaskedOutputTable& table, Encoding encoding) {
  write_file_atomic(path, encode_table(table, encoding));
}

MaskedOutputTable read_table(const fs::path& path) { return decode_table(read_file(path), path.string()); }

void write_spectrum(const fs::path& path, const InteractionSpectrum& spectrum, Encoding encoding) {
  write_file_atomic(path, encode_spectrum(spectrum, encoding));
}

InteractionSpectrum read_spectrum(const fs::path& path) {
  return decode_spectrum(read_file(path), path.string());
}

std::string encode_manifest(const SeriesManifest& m) {
  using nlohmann::json;
  json epochs = json::array();
  for (const auto& e : m.epochs) {
    json tables = json::array();
    for (const auto& t : e.tables) tables.push_back({{"sample", t.sample}, {"path", t.path}});
    epochs.push_back({{"epoch", e.epoch}, {"train_loss", e.train_loss}, {"test_loss", e.test_loss}, {"tables", tables}});
  }
  json doc = {{"format", "andor-series"}, {"format_version", kManifestFormatVersion}, {"n", m.n}, {"epochs", epochs}};
  return doc.dump(1) + "\n";
}

SeriesManifest decode_manifest(std::string_view text, const std::string& source) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(source, std::string("invalid JSON: ") + e.what());
  }
  SeriesManifest m;
  try {
    if (doc.at("format").get<std::string>() != "andor-series") throw FormatError(source, "not a series manifest");
    if (doc.at("format_version").get<int>() != kManifestFormatVersion) {
      throw FormatError(source, "unsupported manifest version");
    }
    m.n = doc.at("n").get<int>();
    for (const auto& e : doc.at("epochs")) {
      ManifestEpoch me;
      me.epoch = e.at("epoch").get<int>();
      me.train_loss = e.at("train_loss").get<double>();
      me.test_loss = e.at("test_loss").get<double>();
      for (const auto& t : e.at("tables")) me.tables.push_back({t.at("sample").get<std::string>(), t.at("path").get<std::string>()});
      m.epochs.push_back(std::move(me));
    }
  } catch (const json::exception& e) {
    throw FormatError(source, std::string("malformed manifest: ") + e.what());
  }
  if (m.n < 0 || m.n > kMaxVariables) throw FormatError(source, "manifest n out of range");
  if (m.epochs.empty()) throw FormatError(source, "manifest lists no epochs");
  for (std::size_t i = 0; i < m.epochs.size(); ++i) {
    const auto& e = m.epochs[i];
    if (i > 0 && e.epoch <= m.epochs[i - 1].epoch) {
      throw FormatError(source, "epochs not strictly increasing at epoch " + std::to_string(e.epoch));
    }
    if (!std::isfinite(e.train_loss) || !std::isfinite(e.test_loss)) {
      throw FormatError(source, "non-finite loss at epoch " + std::to_string(e.epoch));
    }
    if (e.tables.empty()) throw FormatError(source, "epoch " + std::to_string(e.epoch) + " lists no tables");
    std::vector<std::string> samples, first;
    for (const auto& t : e.tables) samples.push_back(t.sample);
    for (const auto& t : m.epochs.front().tables) first.push_back(t.sample);
    std::sort(samples.begin(), samples.end());
    std::sort(first.begin(), first.end());
    if (std::adjacent_find(samples.begin(), samples.end()) != samples.end()) {
      throw FormatError(source, "duplicate sample at epoch " + std::to_string(e.epoch));
    }
    if (samples != first) {
      throw FormatError(source, "epoch " + std::to_string(e.epoch) + " has a different sample set than epoch " +
                                    std::to_string(m.epochs.front().epoch));
    }
  }
  return m;
}

SeriesManifest read_manifest(const fs::path& path) { return decode_manifest(read_file(path), path.string()); }

void write_manifest(const fs::path& path, const SeriesManifest& manifest) {
  write_file_atomic(path, encode_manifest(manifest));
}

std::vector<std::vector<MaskedOutputTable>> load_series_tables(const SeriesManifest& manifest,
                                                               const fs::path& base_dir) {
  std::vector<std::vector<MaskedOutputTable>> out;
  for (const auto& e : manifest.epochs) {
    std::vector<MaskedOutputTable> row;
    for (const auto& t : e.tables) {
      const fs::path p = base_dir / t.path;
      if (!fs::exists(p)) throw FormatError(p.string(), "referenced table file does not exist");
      auto table = read_table(p);
      if (table.n() != manifest.n) throw FormatError(p.string(), "table n differs from the manifest");
      if (table.meta().epoch != e.epoch) throw FormatError(p.string(), "table epoch differs from the manifest");
      if (table.meta().sample_id != t.sample) throw FormatError(p.string(), "table sample differs from the manifest");
      row.push_back(std::move(table));
    }
    out.push_back(std::move(row));
  }
  return out;
}

namespace {

std::string csv_preamble(const std::string& kind) { return "# andor-" + kind + " v" + std::to_string(kCsvVersion) + "\n"; }

}  // namespace

std::string orders_csv(const OrderProfile& profile) {
  std::string out = csv_preamble("orders") + "order,j_pos,j_neg,count\n";
  for (int k = 1; k <= profile.n; ++k) {
    const auto& o = profile.at(k);
    out += std::to_string(k) + "," + format_double(o.j_pos) + "," + format_double(o.j_neg) + "," +
           format_double(o.salient_count) + "\n";
  }
  return out;
}

std::string similarity_csv(std::span<const OrderSimilarity> curve) {
  std::string out = csv_preamble("similarity") + "order,mean_similarity,categories\n";
  for (const auto& s : curve) {
    out += std::to_string(s.k) + "," + format_double(s.mean_similarity) + "," + std::to_string(s.categories) + "\n";
  }
  return out;
}

std::string epoch_csv(std::span<const EpochRecord> series) {
  std::string out = csv_preamble("epochs") + "epoch,mean_order";
  const int n = series.empty() ? 0 : series.front().aggregate.n;
  for (int k = 1; k <= n; ++k) out += ",j_pos_" + std::to_string(k);
  for (int k = 1; k <= n; ++k) out += ",j_neg_" + std::to_string(k);
  out += ",train_loss,test_loss,gap\n";
  for (const auto& r : series) {
    if (r.aggregate.n != n) throw std::invalid_argument("epoch series mixes variable counts");
    out += std::to_string(r.epoch) + "," + format_double(r.aggregate.mean_salient_order);
    for (int k = 1; k <= n; ++k) out += "," + format_double(r.aggregate.at(k).j_pos);
    for (int k = 1; k <= n; ++k) out += "," + format_double(r.aggregate.at(k).j_neg);
    out += "," + format_double(r.train_loss) + "," + format_double(r.test_loss) + "," + format_double(r.gap()) + "\n";
  }
  return out;
}

std::string fusiform_csv(std::span<const FusiformRow> rows) {
  std::string out = csv_preamble("fusiform") + "order,expected_pos,expected_neg,empirical_pos,empirical_neg\n";
  for (const auto& r : rows) {
    out += std::to_string(r.k) + "," + format_double(r.expected_pos) + "," + format_double(r.expected_neg) + "," +
           format_double(r.empirical_pos) + "," + format_double(r.empirical_neg) + "\n";
  }
  return out;
}

std::string group_orders_csv(const OrderProfile& a, const std::string& a_name, const OrderProfile& b,
                             const std::string& b_name) {
  if (a.n != b.n) throw std::invalid_argument("group profiles differ in n");
  std::string out = csv_preamble("group-orders") + "order," + a_name + "_j_pos," + a_name + "_j_neg," + b_name +
                    "_j_pos," + b_name + "_j_neg\n";
  for (int k = 1; k <= a.n; ++k) {
    out += std::to_string(k) + "," + format_double(a.at(k).j_pos) + "," + format_double(a.at(k).j_neg) + "," +
           format_double(b.at(k).j_pos) + "," + format_double(b.at(k).j_neg) + "\n";
  }
  return out;
}

}  // namespace andor::io
