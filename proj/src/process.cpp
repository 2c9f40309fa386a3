#include "omg/process.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

namespace omg {

Dist Dist::laplace(double mean, double sigma) {
  Dist d;
  d.kind = Kind::laplace;
  d.a = mean;
  d.b = sigma;
  return d;
}

Dist Dist::uniform(double lo, double hi) {
  Dist d;
  d.kind = Kind::uniform;
  d.a = lo;
  d.b = hi;
  return d;
}

Dist Dist::point_mass(double value) {
  Dist d;
  d.kind = Kind::point_mass;
  d.a = value;
  return d;
}

Dist Dist::empirical(std::vector<double> samples) {
  Dist d;
  d.kind = Kind::empirical;
  d.samples = std::move(samples);
  return d;
}

void Dist::validate() const {
  switch (kind) {
    case Kind::laplace:
      if (!(b > 0.0)) fail(Errc::config_error, "laplace sigma must be > 0");
      break;
    case Kind::uniform:
      if (!(a <= b)) fail(Errc::config_error, "uniform needs lo <= hi");
      break;
    case Kind::point_mass:
      break;
    case Kind::empirical:
      if (samples.empty()) fail(Errc::config_error, "empirical distribution needs samples");
      break;
  }
}

double Dist::sample(CounterRng& rng) const {
  switch (kind) {
    case Kind::laplace: {
      // Inverse CDF with scale b = sigma / sqrt(2).
      double scale = b / std::sqrt(2.0);
      double u = rng.next_unit();
      return u < 0.5 ? a + scale * std::log(2.0 * u) : a - scale * std::log(2.0 * (1.0 - u));
    }
    case Kind::uniform:
      return a + (b - a) * rng.next_unit();
    case Kind::point_mass:
      return a;
    case Kind::empirical: {
      auto n = samples.size();
      auto idx = std::min(n - 1, static_cast<size_t>(rng.next_unit() * static_cast<double>(n)));
      return samples[idx];
    }
  }
  return 0.0;
}

std::optional<std::pair<double, double>> Dist::natural_range() const {
  switch (kind) {
    case Kind::laplace:
      return std::nullopt;
    case Kind::uniform:
      return std::make_pair(a, b);
    case Kind::point_mass:
      return std::make_pair(a, a);
    case Kind::empirical: {
      auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
      return std::make_pair(*lo, *hi);
    }
  }
  return std::nullopt;
}

void IidSpec::validate() const {
  if (use_joint) {
    if (joint.empty()) fail(Errc::config_error, "joint empirical process needs samples");
  } else {
    delta.validate();
    price.validate();
  }
  validate_support(support);
}

namespace {

double clip(double x, double lo, double hi) { return std::min(std::max(x, lo), hi); }

}  // namespace

std::pair<double, double> sample_iid(const IidSpec& spec, CounterRng& rng) {
  double d, p;
  if (spec.use_joint) {
    auto n = spec.joint.size();
    auto idx = std::min(n - 1, static_cast<size_t>(rng.next_unit() * static_cast<double>(n)));
    d = spec.joint[idx].first;
    p = spec.joint[idx].second;
  } else {
    d = spec.delta.sample(rng);
    p = spec.price.sample(rng);
  }
  return {clip(d, spec.support.delta_min, spec.support.delta_max),
          clip(p, spec.support.price_min, spec.support.price_max)};
}

void MarkovChain::validate() const {
  auto n = transition.size();
  if (n == 0) fail(Errc::config_error, "markov chain needs at least one state");
  for (const auto& row : transition) {
    if (row.size() != n) fail(Errc::config_error, "markov transition matrix must be square");
    double sum = 0.0;
    for (double p : row) {
      if (p < 0.0) fail(Errc::config_error, "markov transition probabilities must be >= 0");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12)
      fail(Errc::config_error, "markov transition rows must sum to 1 (within 1e-12)");
  }
  if (emissions.size() != n)
    fail(Errc::config_error, "markov chain needs one (delta, price) emission per state");
  if (initial < 0 || initial >= static_cast<int>(n))
    fail(Errc::config_error, "markov initial state out of range");

  // Irreducible <=> strongly connected: state 0 reaches all and all reach 0.
  auto reach = [&](bool forward) {
    std::vector<char> seen(n, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      int i = stack.back();
      stack.pop_back();
      for (size_t j = 0; j < n; ++j) {
        double p = forward ? transition[i][j] : transition[j][i];
        if (p > 0.0 && !seen[j]) {
          seen[j] = 1;
          stack.push_back(static_cast<int>(j));
        }
      }
    }
    return seen;
  };
  auto fwd = reach(true), bwd = reach(false);
  for (size_t i = 0; i < n; ++i)
    if (!fwd[i] || !bwd[i])
      fail(Errc::not_irreducible, "markov chain is not irreducible (state " + std::to_string(i) +
                                      (fwd[i] ? " cannot reach state 0" : " unreachable from state 0") +
                                      ")");
}

SupportBounds MarkovChain::derived_support() const {
  SupportBounds b{emissions[0].first, emissions[0].first, emissions[0].second,
                  emissions[0].second};
  for (const auto& [d, p] : emissions) {
    b.delta_min = std::min(b.delta_min, d);
    b.delta_max = std::max(b.delta_max, d);
    b.price_min = std::min(b.price_min, p);
    b.price_max = std::max(b.price_max, p);
  }
  return b;
}

int markov_next(const MarkovChain& chain, int state, CounterRng& rng) {
  double u = rng.next_unit();
  const auto& row = chain.transition[static_cast<size_t>(state)];
  double acc = 0.0;
  for (size_t j = 0; j + 1 < row.size(); ++j) {
    acc += row[j];
    if (u < acc) return static_cast<int>(j);
  }
  return static_cast<int>(row.size() - 1);
}

SupportBounds Trace::derived_support() const {
  SupportBounds b{};
  if (!delta.empty()) {
    auto [dlo, dhi] = std::minmax_element(delta.begin(), delta.end());
    b.delta_min = *dlo;
    b.delta_max = *dhi;
  }
  if (has_price && !price.empty()) {
    auto [plo, phi] = std::minmax_element(price.begin(), price.end());
    b.price_min = *plo;
    b.price_max = *phi;
  }
  return b;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) {
    // trim spaces and a trailing \r
    auto b = field.find_first_not_of(" \t\r");
    auto e = field.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string() : field.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& s, long line_no) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    fail(Errc::parse_error, "line " + std::to_string(line_no) + ": bad number '" + s + "'");
  return v;
}

}  // namespace

Trace load_trace(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) fail(Errc::parse_error, "line 1: empty trace");
  auto header = split_csv_line(line);
  if (header.size() < 2 || header[0] != "t" || header[1] != "delta")
    fail(Errc::missing_column, "header must start with t,delta");
  Trace trace;
  size_t expected = 2;
  if (header.size() > expected && header[expected] == "price") {
    trace.has_price = true;
    ++expected;
  }
  if (header.size() > expected) {
    if (header.size() != expected + 2 || header[expected] != "q_plus" ||
        header[expected + 1] != "q_minus")
      fail(Errc::missing_column,
           "optional penalty columns must be the pair q_plus,q_minus after " +
               std::string(trace.has_price ? "price" : "delta"));
    trace.has_penalties = true;
    expected += 2;
  }

  long line_no = 1;
  long prev_t = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto fields = split_csv_line(line);
    if (fields.size() != expected)
      fail(Errc::parse_error, "line " + std::to_string(line_no) + ": expected " +
                                  std::to_string(expected) + " fields, got " +
                                  std::to_string(fields.size()));
    double traw = parse_number(fields[0], line_no);
    long t = std::lround(traw);
    if (static_cast<double>(t) != traw)
      fail(Errc::parse_error, "line " + std::to_string(line_no) + ": t must be an integer");
    if (t <= prev_t)
      fail(Errc::non_monotone_time,
           "line " + std::to_string(line_no) + ": t = " + std::to_string(t) +
               " does not increase past " + std::to_string(prev_t));
    if (t != prev_t + 1)
      fail(Errc::gap_error, "line " + std::to_string(line_no) + ": t jumps from " +
                                std::to_string(prev_t) + " to " + std::to_string(t));
    prev_t = t;
    size_t col = 1;
    trace.delta.push_back(parse_number(fields[col++], line_no));
    if (trace.has_price) trace.price.push_back(parse_number(fields[col++], line_no));
    if (trace.has_penalties) {
      trace.q_plus.push_back(parse_number(fields[col++], line_no));
      trace.q_minus.push_back(parse_number(fields[col++], line_no));
    }
  }
  if (trace.delta.empty()) fail(Errc::parse_error, "trace has a header but no records");
  return trace;
}

Trace load_trace_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::parse_error, "cannot open trace file: " + path);
  return load_trace(in);
}

}  // namespace omg
