#include "metaboot/csv_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "metaboot/effect_sizes.hpp"

namespace metaboot {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

double parse_field(const std::string& field, std::size_t line_no,
                   const std::string& column) {
  const char* begin = field.c_str();
  char* end = nullptr;
  double value = std::strtod(begin, &end);
  if (end == begin || *end != '\0')
    fail(errc::row_error, "line " + std::to_string(line_no) +
                              ": cannot parse '" + field + "' in column " +
                              column);
  return value;
}

std::size_t require_column(const std::vector<std::string>& header,
                           const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  fail(errc::schema_error, "missing required column '" + name + "'");
}

std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// tanh value that re-ingests bit-identically: the transform applied on read is
// 0.5*log((1+r)/(1-r)), so search a few ulps around tanh(z) for a correlation
// that inverts through exactly that expression.
double tanh_roundtrip(double z) {
  auto inverts = [z](double c) {
    return std::fabs(c) < 1.0 && 0.5 * std::log((1.0 + c) / (1.0 - c)) == z;
  };
  double r = std::tanh(z);
  double lo = r, hi = r;
  for (int i = 0; i < 8; ++i) {
    if (inverts(lo)) return lo;
    if (inverts(hi)) return hi;
    lo = std::nextafter(lo, -2.0);
    hi = std::nextafter(hi, 2.0);
  }
  return r;
}

}  // namespace

MetaDataset ingest_csv(const std::string& path, EffectKind effect,
                       const std::vector<std::string>& moderator_columns,
                       bool adjust) {
  std::ifstream in(path);
  if (!in) fail(errc::schema_error, "cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line))
    fail(errc::schema_error, "'" + path + "' is empty");
  std::vector<std::string> header = split_csv_line(line);

  if (adjust && effect != EffectKind::smd)
    fail(errc::bad_config, "adjust applies to standardized mean differences");

  // resolve the schema up front
  std::vector<std::size_t> cols;
  bool smd_summary_form = false;
  switch (effect) {
    case EffectKind::smd: {
      bool has_est = false;
      for (const std::string& h : header) has_est |= (h == "est");
      if (has_est) {
        cols = {require_column(header, "n1"), require_column(header, "n2"),
                require_column(header, "est")};
      } else {
        smd_summary_form = true;
        cols = {require_column(header, "n1"),    require_column(header, "n2"),
                require_column(header, "mean1"), require_column(header, "mean2"),
                require_column(header, "sd1"),   require_column(header, "sd2")};
      }
      break;
    }
    case EffectKind::fisher_z:
      cols = {require_column(header, "n"), require_column(header, "r")};
      break;
    case EffectKind::log_or:
      cols = {require_column(header, "n00"), require_column(header, "n01"),
              require_column(header, "n10"), require_column(header, "n11")};
      break;
  }
  std::vector<std::size_t> mod_cols;
  for (const std::string& m : moderator_columns)
    mod_cols.push_back(require_column(header, m));

  MetaDataset ds;
  ds.n_covariates = mod_cols.size();
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> fields = split_csv_line(line);
    auto get = [&](std::size_t col) -> double {
      if (col >= fields.size())
        fail(errc::row_error,
             "line " + std::to_string(line_no) + ": too few fields");
      return parse_field(fields[col], line_no, header[col]);
    };
    try {
      switch (effect) {
        case EffectKind::smd:
          if (smd_summary_form)
            ds.studies.push_back(smd_from_summary(get(cols[0]), get(cols[1]),
                                                  get(cols[2]), get(cols[3]),
                                                  get(cols[4]), get(cols[5])));
          else
            ds.studies.push_back(
                smd_from_estimate(get(cols[0]), get(cols[1]), get(cols[2]), adjust));
          break;
        case EffectKind::fisher_z:
          ds.studies.push_back(fisher_z(get(cols[1]), get(cols[0])));
          break;
        case EffectKind::log_or:
          ds.studies.push_back(log_odds_ratio(get(cols[0]), get(cols[1]),
                                              get(cols[2]), get(cols[3])));
          break;
      }
    } catch (const error& e) {
      if (e.code() == errc::row_error || e.code() == errc::schema_error) throw;
      fail(errc::row_error,
           "line " + std::to_string(line_no) + ": " + e.what());
    }
    for (std::size_t c : mod_cols) ds.covariates.push_back(get(c));
  }
  if (ds.k() < 2)
    fail(errc::empty_dataset,
         "'" + path + "' holds " + std::to_string(ds.k()) + " usable studies");
  ds.validate();
  return ds;
}

void export_csv(const MetaDataset& ds, const std::string& path,
                const std::vector<std::string>& moderator_columns) {
  std::ofstream out(path);
  if (!out) fail(errc::schema_error, "cannot write '" + path + "'");
  std::vector<std::string> mod_names = moderator_columns;
  for (std::size_t c = mod_names.size(); c < ds.p(); ++c)
    mod_names.push_back("z" + std::to_string(c + 1));

  EffectKind kind = ds.studies.empty() ? EffectKind::smd : ds.studies[0].kind;
  switch (kind) {
    case EffectKind::smd: out << "n1,n2,est"; break;
    case EffectKind::fisher_z: out << "n,r"; break;
    case EffectKind::log_or: out << "n00,n01,n10,n11"; break;
  }
  for (std::size_t c = 0; c < ds.p(); ++c) out << ',' << mod_names[c];
  out << '\n';

  for (std::size_t j = 0; j < ds.k(); ++j) {
    const StudyEffect& s = ds.studies[j];
    switch (kind) {
      case EffectKind::smd: {
        const SmdRaw* raw = std::get_if<SmdRaw>(&s.raw);
        if (!raw)
          fail(errc::missing_raw,
               "study " + std::to_string(j + 1) + " has no group sizes");
        out << fmt_g17(raw->n1) << ',' << fmt_g17(raw->n2) << ','
            << fmt_g17(s.estimate);
        break;
      }
      case EffectKind::fisher_z: {
        const CorRaw* raw = std::get_if<CorRaw>(&s.raw);
        if (!raw)
          fail(errc::missing_raw,
               "study " + std::to_string(j + 1) + " has no sample size");
        out << fmt_g17(raw->n) << ',' << fmt_g17(tanh_roundtrip(s.estimate));
        break;
      }
      case EffectKind::log_or: {
        const OrRaw* raw = std::get_if<OrRaw>(&s.raw);
        if (!raw)
          fail(errc::missing_raw,
               "study " + std::to_string(j + 1) + " has no 2x2 cells");
        out << fmt_g17(raw->n00) << ',' << fmt_g17(raw->n01) << ','
            << fmt_g17(raw->n10) << ',' << fmt_g17(raw->n11);
        break;
      }
    }
    for (std::size_t c = 0; c < ds.p(); ++c) out << ',' << fmt_g17(ds.z(j, c));
    out << '\n';
  }
}

}  // namespace metaboot
