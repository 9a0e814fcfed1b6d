#include "matchlift/instance_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "matchlift/error.hpp"

namespace matchlift {

namespace {

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  bool next(std::string& line) {
    if (!std::getline(in_, line)) return false;
    ++number_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  }

  std::string require() {
    std::string line;
    if (!next(line)) fail("unexpected end of file");
    return line;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::kParse, "line " + std::to_string(number_) + ": " + what);
  }

 private:
  std::istream& in_;
  int number_ = 0;
};

std::vector<long long> parse_ints(const LineReader& reader, std::string_view text) {
  std::vector<long long> out;
  const char* p = text.data();
  const char* end = p + text.size();
  while (p < end) {
    while (p < end && (*p == ' ' || *p == '\t')) ++p;
    if (p == end) break;
    long long v = 0;
    auto [next, ec] = std::from_chars(p, end, v);
    if (ec != std::errc() || (next < end && *next != ' ' && *next != '\t')) {
      reader.fail("expected integer in '" + std::string(text) + "'");
    }
    out.push_back(v);
    p = next;
  }
  return out;
}

}  // namespace

std::vector<int> InstanceFile::sizes() const {
  std::vector<int> s;
  s.reserve(elements.size());
  for (const auto& e : elements) s.push_back(static_cast<int>(e.size()));
  return s;
}

std::optional<MembershipMatrix> InstanceFile::truth() const {
  if (m <= 0) return std::nullopt;
  std::vector<int> labels;
  for (const auto& e : elements) labels.insert(labels.end(), e.begin(), e.end());
  return make_membership(sizes(), std::move(labels), m);
}

InstanceFile to_instance_file(const Instance& inst) {
  InstanceFile f;
  f.m = inst.params.m;
  for (int i = 0; i < inst.x_in.n(); ++i) {
    const auto first = inst.truth.labels.begin() + inst.x_in.offset(i);
    f.elements.emplace_back(first, first + inst.x_in.size(i));
  }
  f.graph = inst.graph;
  f.x_in = inst.x_in;
  return f;
}

InstanceFile to_instance_file(const BlockMapMatrix& x) {
  if (x.mode() != BlockMode::kBinary) {
    throw Error(ErrorCode::kInvalidParams, "only binary matrices map onto the instance format");
  }
  const auto fact = factorize_consistent(x);
  InstanceFile f;
  f.graph = MapGraph(x.n());
  f.x_in = x;
  if (const auto* y = std::get_if<MembershipMatrix>(&fact)) {
    f.m = y->universe_size;
    for (int i = 0; i < x.n(); ++i) {
      const auto first = y->labels.begin() + x.offset(i);
      f.elements.emplace_back(first, first + x.size(i));
    }
  } else {
    for (int i = 0; i < x.n(); ++i) {
      std::vector<int> ids(static_cast<std::size_t>(x.size(i)));
      for (int r = 0; r < x.size(i); ++r) ids[static_cast<std::size_t>(r)] = r;
      f.elements.push_back(std::move(ids));
    }
  }
  for (int i = 0; i < x.n(); ++i) {
    for (int j = i + 1; j < x.n(); ++j) {
      if (!x.block(i, j).is_zero()) f.graph.add_edge(i, j);
    }
  }
  return f;
}

void write_instance(std::ostream& out, const InstanceFile& file) {
  out << file.elements.size() << ' ' << file.m << '\n';
  for (std::size_t i = 0; i < file.elements.size(); ++i) {
    out << i << ':';
    for (int s : file.elements[i]) out << ' ' << s;
    out << '\n';
  }
  for (auto [i, j] : file.graph.edges()) {
    const auto block = file.x_in.block(i, j);
    out << i << ' ' << j << ' ' << block.ones().size() << '\n';
    for (const auto& e : block.ones()) out << e.row << ' ' << e.col << '\n';
  }
}

InstanceFile read_instance(std::istream& in, SymmetrizePolicy policy) {
  LineReader reader(in);
  InstanceFile f;
  const auto header = parse_ints(reader, reader.require());
  if (header.size() != 2 || header[0] < 0 || header[1] < 0) reader.fail("header must be '<n> <m>'");
  const int n = static_cast<int>(header[0]);
  f.m = static_cast<int>(header[1]);

  for (int i = 0; i < n; ++i) {
    const std::string line = reader.require();
    const auto colon = line.find(':');
    if (colon == std::string::npos) reader.fail("expected '<i>: <elements>'");
    const auto idx = parse_ints(reader, std::string_view(line).substr(0, colon));
    if (idx.size() != 1 || idx[0] != i) reader.fail("object lines must be numbered 0..n-1 in order");
    std::vector<int> elems;
    for (long long v : parse_ints(reader, std::string_view(line).substr(colon + 1))) {
      elems.push_back(static_cast<int>(v));
    }
    f.elements.push_back(std::move(elems));
  }

  f.graph = MapGraph(n);
  std::vector<BlockEntry> blocks;
  std::string line;
  while (reader.next(line)) {
    if (line.empty()) continue;
    const auto head = parse_ints(reader, line);
    if (head.size() != 3 || head[2] < 0) reader.fail("edge line must be '<i> <j> <k>'");
    const int i = static_cast<int>(head[0]), j = static_cast<int>(head[1]);
    if (i < 0 || j < 0 || i >= n || j >= n || i == j) reader.fail("invalid edge");
    std::vector<Correspondence> ones;
    for (long long k = 0; k < head[2]; ++k) {
      const auto rc = parse_ints(reader, reader.require());
      if (rc.size() != 2) reader.fail("correspondence line must be '<r> <c>'");
      ones.push_back({static_cast<int>(rc[0]), static_cast<int>(rc[1])});
    }
    f.graph.add_edge(i, j);
    blocks.push_back({i, j,
                      PartialMapBlock::binary(static_cast<int>(f.elements[static_cast<std::size_t>(i)].size()),
                                              static_cast<int>(f.elements[static_cast<std::size_t>(j)].size()),
                                              std::move(ones))});
  }
  f.x_in = assemble(f.sizes(), blocks, policy);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const auto violations = validate_substochastic(f.x_in.block(i, j));
      if (!violations.empty()) {
        throw Error(ErrorCode::kParse, "block (" + std::to_string(i) + "," + std::to_string(j) +
                                           ") is not doubly sub-stochastic");
      }
    }
  }
  if (f.m > 0) (void)f.truth();
  return f;
}

void save_instance(const std::filesystem::path& path, const InstanceFile& file) {
  std::ostringstream out;
  write_instance(out, file);
  write_text_file(path, out.str());
}

InstanceFile load_instance(const std::filesystem::path& path, SymmetrizePolicy policy) {
  std::istringstream in(read_text_file(path));
  try {
    return read_instance(in, policy);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.detail());
  }
}

void write_relaxed(std::ostream& out, const BlockMapMatrix& x) {
  out << "relaxed " << x.order() << ' ' << x.n() << '\n';
  for (int i = 0; i < x.n(); ++i) out << (i ? " " : "") << x.size(i);
  out << '\n';
  const auto dense = x.to_dense();
  const std::size_t total = static_cast<std::size_t>(x.order());
  char buf[32];
  for (std::size_t p = 0; p < total; ++p) {
    for (std::size_t q = 0; q < total; ++q) {
      std::snprintf(buf, sizeof buf, "%.17g", dense[p * total + q]);
      if (q) out << ' ';
      out << buf;
    }
    out << '\n';
  }
}

BlockMapMatrix read_relaxed(std::istream& in) {
  std::string tag;
  int total = 0, n = 0;
  if (!(in >> tag >> total >> n) || tag != "relaxed" || total < 0 || n < 0) {
    throw Error(ErrorCode::kParse, "relaxed matrix header must be 'relaxed <N> <n>'");
  }
  std::vector<int> sizes(static_cast<std::size_t>(n));
  for (auto& s : sizes) {
    if (!(in >> s) || s < 0) throw Error(ErrorCode::kParse, "bad object size list");
  }
  std::vector<double> dense(static_cast<std::size_t>(total) * static_cast<std::size_t>(total));
  for (auto& v : dense) {
    if (!(in >> v)) throw Error(ErrorCode::kParse, "truncated relaxed matrix");
  }
  return BlockMapMatrix::from_dense(std::move(sizes), dense, BlockMode::kRelaxed);
}

void save_relaxed(const std::filesystem::path& path, const BlockMapMatrix& x) {
  std::ostringstream out;
  write_relaxed(out, x);
  write_text_file(path, out.str());
}

BlockMapMatrix load_relaxed(const std::filesystem::path& path) {
  std::istringstream in(read_text_file(path));
  try {
    return read_relaxed(in);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.detail());
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string() + " for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  out << contents;
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

}  // namespace matchlift
