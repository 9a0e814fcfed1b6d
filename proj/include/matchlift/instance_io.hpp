#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "matchlift/mapcore.hpp"
#include "matchlift/synth.hpp"

namespace matchlift {

/// Contents of a plain-text instance file.
///
///   <n> <m>
///   <i>: <s_1> <s_2> ...          one line per object, i = 0..n-1
///   <i> <j> <k>                   one line per observed pair, i < j, ascending
///   <r> <c>                       k lines of unit entries of block (i, j)
///
/// All indices are 0-based. When m > 0 the element lists are universe labels
/// and define the ground truth; when m = 0 they are opaque point ids and only
/// their count matters. Writing a parsed canonical file reproduces it byte for
/// byte.
struct InstanceFile {
  int m = 0;
  std::vector<std::vector<int>> elements;
  MapGraph graph;
  BlockMapMatrix x_in;

  std::vector<int> sizes() const;
  /// Ground truth, available when m > 0.
  std::optional<MembershipMatrix> truth() const;
};

InstanceFile to_instance_file(const Instance& inst);

/// Binary block map matrix written as an instance file whose element lists
/// are its canonical cluster labels and whose edges are its nonzero blocks.
InstanceFile to_instance_file(const BlockMapMatrix& x);

void write_instance(std::ostream& out, const InstanceFile& file);
InstanceFile read_instance(std::istream& in,
                           SymmetrizePolicy policy = SymmetrizePolicy::kReject);

void save_instance(const std::filesystem::path& path, const InstanceFile& file);
InstanceFile load_instance(const std::filesystem::path& path,
                           SymmetrizePolicy policy = SymmetrizePolicy::kReject);

/// Relaxed N x N matrix file:
///
///   relaxed <N> <n>
///   <m_1> ... <m_n>
///   N lines of N values printed with 17 significant digits
void write_relaxed(std::ostream& out, const BlockMapMatrix& x);
BlockMapMatrix read_relaxed(std::istream& in);
void save_relaxed(const std::filesystem::path& path, const BlockMapMatrix& x);
BlockMapMatrix load_relaxed(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace matchlift
