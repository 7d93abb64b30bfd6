#include "knockoffs/io.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace knockoffs::io {

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

struct Token {
  std::string text;
  int line;
};

// Splits a params file into tokens, dropping `#` comments.
class Tokens {
 public:
  explicit Tokens(std::istream& in) {
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
      ++number;
      if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      std::istringstream fields(line);
      std::string word;
      while (fields >> word) tokens_.push_back({word, number});
    }
    last_line_ = number;
  }

  const Token& next(const char* what) {
    if (pos_ >= tokens_.size())
      throw ParseError(std::string("unexpected end of file, expected ") + what, last_line_);
    return tokens_[pos_++];
  }

  void expect(const std::string& keyword) {
    const Token& t = next(keyword.c_str());
    if (t.text != keyword)
      throw ParseError("expected '" + keyword + "', found '" + t.text + "'", t.line);
  }

  long long integer(const char* what) {
    const Token& t = next(what);
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc() || ptr != t.text.data() + t.text.size())
      throw ParseError(std::string("expected integer ") + what + ", found '" + t.text + "'",
                       t.line);
    return v;
  }

  int positive(const char* what) {
    const int line = peek_line();
    const long long v = integer(what);
    if (v < 1 || v > 100000000) throw ParseError(std::string(what) + " must be positive", line);
    return static_cast<int>(v);
  }

  double real(const char* what) {
    const Token& t = next(what);
    double v = 0;
    const auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc() || ptr != t.text.data() + t.text.size() || !std::isfinite(v))
      throw ParseError(std::string("expected real ") + what + ", found '" + t.text + "'", t.line);
    return v;
  }

  void block(const std::string& keyword, long long index) {
    expect(keyword);
    const int line = peek_line();
    const long long j = integer("block index");
    if (j != index)
      throw ParseError(keyword + " block " + std::to_string(j) + " out of order (expected " +
                           std::to_string(index) + ")",
                       line);
  }

  int peek_line() const { return pos_ < tokens_.size() ? tokens_[pos_].line : last_line_; }

  void finish() const {
    if (pos_ < tokens_.size())
      throw ParseError("trailing content '" + tokens_[pos_].text + "'", tokens_[pos_].line);
  }

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  int last_line_ = 0;
};

RowMatrixXd read_matrix(Tokens& t, int rows, int cols, const char* what) {
  RowMatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int k = 0; k < cols; ++k) m(i, k) = t.real(what);
  return m;
}

void write_matrix(std::ostream& out, const RowMatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index k = 0; k < m.cols(); ++k) out << (k ? " " : "") << format_real(m(i, k));
    out << '\n';
  }
}

void write_vector_line(std::ostream& out, const std::string& keyword, const VectorXd& v) {
  out << keyword;
  for (Eigen::Index k = 0; k < v.size(); ++k) out << ' ' << format_real(v(k));
  out << '\n';
}

// Model constructors report invariant violations as ModelError; inside a
// parser they become parse errors tied to the end of the relevant block.
template <typename Fn>
auto build(int line, Fn&& fn) {
  try {
    return fn();
  } catch (const ModelError& e) {
    throw ParseError(e.what(), line);
  }
}

void write_chain_body(std::ostream& out, const MarkovChaind& chain) {
  write_vector_line(out, "Q1", chain.initial());
  for (int t = 0; t + 1 < chain.length(); ++t) {
    out << "Q " << t + 1 << '\n';
    write_matrix(out, chain.transition(t));
  }
}

std::vector<RowMatrixXd> read_transitions(Tokens& t, int K, int p) {
  std::vector<RowMatrixXd> Q;
  for (int j = 1; j < p; ++j) {
    t.block("Q", j);
    Q.push_back(read_matrix(t, K, K, "transition probability"));
  }
  return Q;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream fields(line);
  std::string f;
  while (fields >> f) out.push_back(f);
  return out;
}

template <typename T>
bool parse_number(const std::string& s, T& v) {
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  return ec == std::errc() && ptr == s.data() + s.size();
}

template <typename T>
Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> read_tsv(std::istream& in) {
  std::vector<std::vector<T>> rows;
  std::string line;
  int number = 0;
  bool first = true;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto fields = split_fields(line);
    if (fields.empty() || fields[0][0] == '#') continue;
    std::vector<T> row(fields.size());
    bool numeric = true;
    for (std::size_t k = 0; k < fields.size(); ++k) numeric = numeric && parse_number(fields[k], row[k]);
    if (!numeric) {
      if (first) {
        first = false;
        width = fields.size();
        continue;  // header row
      }
      throw ParseError("non-numeric field in data row", number);
    }
    if (width == 0) width = fields.size();
    if (fields.size() != width)
      throw ParseError("expected " + std::to_string(width) + " fields, found " +
                           std::to_string(fields.size()),
                       number);
    first = false;
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("no data rows", number);
  Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> m(
      static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t k = 0; k < width; ++k) m(i, k) = rows[i][k];
  return m;
}

}  // namespace

ParamsKind detect_params(std::istream& in) {
  const auto start = in.tellg();
  std::string line;
  int number = 0;
  std::string magic;
  while (magic.empty() && std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    fields >> magic;
  }
  in.clear();
  in.seekg(start);
  if (magic == "MCPARAMS") return ParamsKind::Mc;
  if (magic == "HMMPARAMS") return ParamsKind::Hmm;
  if (magic == "GENOPARAMS") return ParamsKind::Geno;
  throw ParseError("unrecognized params file (magic '" + magic + "')", number);
}

ParamsKind detect_params_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return detect_params(in);
}

void write_mc_params(std::ostream& out, const MarkovChaind& chain) {
  out << "MCPARAMS 1\n";
  out << "K " << chain.states() << " P " << chain.length() << '\n';
  write_chain_body(out, chain);
}

void write_hmm_params(std::ostream& out, const HiddenMarkovModeld& hmm) {
  out << "HMMPARAMS 1\n";
  out << "K " << hmm.states() << " P " << hmm.length() << " M " << hmm.symbols() << '\n';
  write_chain_body(out, hmm.latent());
  for (int j = 0; j < hmm.length(); ++j) {
    out << "F " << j + 1 << '\n';
    write_matrix(out, hmm.emission(j));
  }
}

void write_geno_params(std::ostream& out, const HaplotypeModeld& model) {
  out << "GENOPARAMS 1\n";
  out << "K " << model.motifs() << " P " << model.sites() << '\n';
  write_vector_line(out, "R", model.r());
  out << "ALPHA\n";
  write_matrix(out, model.alpha());
  out << "THETA\n";
  write_matrix(out, model.theta());
}

MarkovChaind read_mc_params(std::istream& in) {
  Tokens t(in);
  t.expect("MCPARAMS");
  t.expect("1");
  t.expect("K");
  const int K = t.positive("K");
  t.expect("P");
  const int p = t.positive("P");
  t.expect("Q1");
  VectorXd q1 = read_matrix(t, 1, K, "initial probability").row(0).transpose();
  auto Q = read_transitions(t, K, p);
  const int line = t.peek_line();
  t.finish();
  return build(line, [&] { return MarkovChaind(std::move(q1), std::move(Q)); });
}

HiddenMarkovModeld read_hmm_params(std::istream& in) {
  Tokens t(in);
  t.expect("HMMPARAMS");
  t.expect("1");
  t.expect("K");
  const int K = t.positive("K");
  t.expect("P");
  const int p = t.positive("P");
  t.expect("M");
  const int M = t.positive("M");
  t.expect("Q1");
  VectorXd q1 = read_matrix(t, 1, K, "initial probability").row(0).transpose();
  auto Q = read_transitions(t, K, p);
  const int chain_line = t.peek_line();
  MarkovChaind chain = build(chain_line, [&] { return MarkovChaind(std::move(q1), std::move(Q)); });
  std::vector<RowMatrixXd> F;
  for (int j = 1; j <= p; ++j) {
    t.block("F", j);
    F.push_back(read_matrix(t, K, M, "emission probability"));
  }
  const int line = t.peek_line();
  t.finish();
  return build(line, [&] { return HiddenMarkovModeld(std::move(chain), std::move(F)); });
}

HaplotypeModeld read_geno_params(std::istream& in) {
  Tokens t(in);
  t.expect("GENOPARAMS");
  t.expect("1");
  t.expect("K");
  const int K = t.positive("K");
  t.expect("P");
  const int p = t.positive("P");
  t.expect("R");
  VectorXd r = read_matrix(t, 1, p, "recombination parameter").row(0).transpose();
  t.expect("ALPHA");
  RowMatrixXd alpha = read_matrix(t, p, K, "motif weight");
  t.expect("THETA");
  RowMatrixXd theta = read_matrix(t, p, K, "allele frequency");
  const int line = t.peek_line();
  t.finish();
  return build(line, [&] {
    return HaplotypeModeld(std::move(r), std::move(alpha), std::move(theta));
  });
}

IntMatrix read_int_tsv(std::istream& in) { return read_tsv<int>(in); }

Eigen::MatrixXd read_real_tsv(std::istream& in) { return read_tsv<double>(in); }

void write_int_tsv(std::ostream& out, const IntMatrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index k = 0; k < m.cols(); ++k) out << (k ? "\t" : "") << m(i, k);
    out << '\n';
  }
}

void write_real_tsv(std::ostream& out, const Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index k = 0; k < m.cols(); ++k) out << (k ? "\t" : "") << format_real(m(i, k));
    out << '\n';
  }
}

std::vector<std::string> OutputHeader::lines() const {
  std::vector<std::string> out;
  out.push_back("knockoffs " + version);
  out.push_back("subcommand: " + subcommand);
  std::string f = "flags:";
  for (const auto& [name, value] : flags) f += " --" + name + "=" + value;
  out.push_back(f);
  out.push_back("seed: " + std::to_string(seed));
  out.push_back("timestamp: " + timestamp);
  return out;
}

std::string OutputHeader::render(const std::string& prefix, const std::string& suffix) const {
  std::string out;
  for (const auto& l : lines()) out += prefix + l + suffix + "\n";
  return out;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace knockoffs::io
