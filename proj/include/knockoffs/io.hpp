#pragma once

#include "knockoffs/common.hpp"
#include "knockoffs/genotype.hpp"
#include "knockoffs/hmm.hpp"
#include "knockoffs/markov_chain.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace knockoffs::io {

/// Real number with 17 significant digits (lossless for doubles).
std::string format_real(double v);

enum class ParamsKind { Mc, Hmm, Geno };

/// Reads the magic line of a params file without consuming the stream.
ParamsKind detect_params(std::istream& in);
ParamsKind detect_params_file(const std::string& path);

void write_mc_params(std::ostream& out, const MarkovChaind& chain);
void write_hmm_params(std::ostream& out, const HiddenMarkovModeld& hmm);
void write_geno_params(std::ostream& out, const HaplotypeModeld& model);

/// Parsers accept `#` comments anywhere and arbitrary whitespace; malformed
/// input raises ParseError naming the offending line.
MarkovChaind read_mc_params(std::istream& in);
HiddenMarkovModeld read_hmm_params(std::istream& in);
HaplotypeModeld read_geno_params(std::istream& in);

/// Whitespace-separated matrices, one row per line. Blank lines and lines
/// starting with `#` are skipped; a first row containing any non-numeric field
/// is treated as a header.
IntMatrix read_int_tsv(std::istream& in);
Eigen::MatrixXd read_real_tsv(std::istream& in);

void write_int_tsv(std::ostream& out, const IntMatrix& m);
void write_real_tsv(std::ostream& out, const Eigen::MatrixXd& m);

/// Provenance header written at the top of every output file. The timestamp
/// sits alone on the last line so byte comparisons can skip it.
struct OutputHeader {
  std::string version;
  std::string subcommand;
  std::vector<std::pair<std::string, std::string>> flags;
  std::uint64_t seed = 0;
  std::string timestamp;

  /// Header lines without comment markers.
  std::vector<std::string> lines() const;
  /// `prefix` + line + `suffix` for each line, newline-terminated.
  std::string render(const std::string& prefix = "# ", const std::string& suffix = "") const;
};

std::string utc_timestamp();

}  // namespace knockoffs::io
