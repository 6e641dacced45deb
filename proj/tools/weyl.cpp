#include <CLI11.hpp>

#include "weyl/asym.hpp"
#include "weyl/parallel.hpp"

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

using namespace weyl;

namespace {

std::string json_str(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out + "\"";
}

std::string json_num(double x) { return std::isfinite(x) ? fmt17(x) : "null"; }

void emit_error(const std::string& message) {
    std::cerr << "{\"error\": " << json_str(message) << "}\n";
}

void write_artifact(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    f << content;
    f.flush();
    if (!f) throw std::runtime_error("cannot write '" + path + "'");
}

struct Options {
    std::string space;
    std::string synthetic;
    std::string lambda2_text;
    std::string lambda_text;
    std::string format;
    std::string out;
    bool param_sweep = false;
    long long jumps = -1;
    double lmin = -1, lmax = -1;
    long long points = 2000;
    double window_ratio = 0;
    long long kmax = 10000;
    int threads = 0;
};

std::size_t to_size(const BigInt& v, const char* what) {
    if (v < 0 || v > 100000000) throw std::invalid_argument(std::string(what) + " out of range");
    return v.convert_to<std::size_t>();
}

// smallest/largest jump indices k >= 1 with lambda_min <= sqrt(alpha(k)) <= lambda_max
std::pair<std::size_t, std::size_t> jump_range(const SpectralModel& m, const Rational& lmin2,
                                               const Rational& lmax2) {
    auto hi = k_max(m, Threshold(lmax2));
    if (!hi) throw std::invalid_argument("no jumps at or below lambda_max for " + m.name);
    BigInt lo = 0;
    if (auto below = k_max(m, Threshold(lmin2)))
        lo = (m.alpha(*below) == lmin2) ? *below : *below + 1;
    if (lo < 1) lo = 1;
    if (lo > *hi)
        throw std::invalid_argument("no jumps between lambda_min and lambda_max for " + m.name);
    return {to_size(lo, "jump index"), to_size(*hi, "jump index")};
}

Rational lambda2_from(const Options& opt) {
    const bool has2 = !opt.lambda2_text.empty();
    const bool has1 = !opt.lambda_text.empty();
    if (has2 == has1) throw std::invalid_argument("give exactly one of --lambda2 and --lambda");
    if (has2) return parse_rational(opt.lambda2_text);
    Rational l = parse_rational(opt.lambda_text);
    if (l < 0) throw std::invalid_argument("--lambda must be nonnegative");
    return l * l;
}

// empty means "not given": the first entry of `allowed` is the default
std::string check_format(const std::string& format, std::initializer_list<const char*> allowed) {
    if (format.empty()) return *allowed.begin();
    for (const char* a : allowed)
        if (format == a) return format;
    throw std::invalid_argument("unsupported format '" + format + "'");
}

void require_range(const Options& opt) {
    if (opt.lmin < 0 || opt.lmax < 0)
        throw std::invalid_argument("this space needs --lmin and --lmax");
}

std::string alpha_string(const SpectralModel& m) {
    return poly_to_string(Poly({m.C, m.B, m.A}), "k");
}

std::string pass_str(bool pass) { return pass ? "PASS" : "FAIL"; }

// builds the series a subcommand operates on: jump samples for a single
// space, a geometric lambda grid for a product
CountSeries build_series(const Options& opt, bool allow_jumps) {
    std::vector<SpectralModel> factors = parse_spaces(opt.space);
    if (factors.size() == 1) {
        const SpectralModel& m = factors[0];
        if (opt.jumps >= 0) {
            if (!allow_jumps) throw std::invalid_argument("--jumps is not valid here");
            if (opt.lmin >= 0 || opt.lmax >= 0)
                throw std::invalid_argument("give either --jumps or --lmin/--lmax, not both");
            if (opt.jumps < 1) throw std::invalid_argument("--jumps must be at least 1");
            return jump_series(m, 1, to_size(BigInt(opt.jumps), "jump index"));
        }
        require_range(opt);
        Rational lo(opt.lmin), hi(opt.lmax);
        auto [k_lo, k_hi] = jump_range(m, lo * lo, hi * hi);
        return jump_series(m, k_lo, k_hi);
    }
    if (opt.jumps >= 0)
        throw std::invalid_argument("--jumps applies to single spaces; use --lmin/--lmax");
    require_range(opt);
    if (opt.points < 2 || opt.points > 1000000)
        throw std::invalid_argument("--points must be between 2 and 1000000");
    ProductModel pm = make_product(std::move(factors));
    auto grid = geometric_grid(opt.lmin, opt.lmax, static_cast<std::size_t>(opt.points));
    return count_product_series(pm, grid, resolve_threads(opt.threads));
}

std::string series_csv(const CountSeries& s) {
    std::ostringstream os;
    os << "lambda,count,main_term,remainder,normalized_remainder\n";
    for (std::size_t j = 0; j < s.size(); ++j) {
        Float50 main = Float50(s.c1) * pow_lambda_f50(s.lambda2[j], s.d);
        Float50 denom = pow_lambda_f50(s.lambda2[j], s.d - 1);
        double norm = denom == 0 ? 0.0 : (Float50(s.remainders[j]) / denom).convert_to<double>();
        os << fmt17(s.lambdas[j]) << ',' << s.counts[j].str() << ','
           << fmt17(main.convert_to<double>()) << ',' << fmt17(s.remainders[j]) << ','
           << fmt17(norm) << '\n';
    }
    return os.str();
}

std::string series_json(const CountSeries& s) {
    std::ostringstream os;
    os << "{\"space\": " << json_str(s.space) << ", \"d\": " << s.d
       << ", \"c1\": " << json_num(s.c1) << ", \"rows\": [";
    for (std::size_t j = 0; j < s.size(); ++j) {
        Float50 main = Float50(s.c1) * pow_lambda_f50(s.lambda2[j], s.d);
        Float50 denom = pow_lambda_f50(s.lambda2[j], s.d - 1);
        double norm = denom == 0 ? 0.0 : (Float50(s.remainders[j]) / denom).convert_to<double>();
        os << (j ? ",\n  " : "\n  ") << "{\"lambda\": " << json_num(s.lambdas[j])
           << ", \"count\": " << s.counts[j].str()
           << ", \"main_term\": " << json_num(main.convert_to<double>())
           << ", \"remainder\": " << json_num(s.remainders[j])
           << ", \"normalized_remainder\": " << json_num(norm) << "}";
    }
    os << "\n]}\n";
    return os.str();
}

// --- catalog -----------------------------------------------------------------

int cmd_catalog(const Options& opt) {
    const std::string format = check_format(opt.format, {"table", "json"});
    std::ostringstream os;
    bool all_pass = true;
    if (opt.param_sweep) {
        struct Row {
            std::string name, family;
            int param, d;
            Rational A, B, C, kap;
            bool pass;
        };
        std::vector<Row> rows;
        for (const auto& r : sweep_ranges())
            for (int p = r.lo; p <= r.hi; ++p) {
                SpectralModel m = model(r.family, p);
                bool pass = w_verify(m).pass;
                all_pass = all_pass && pass;
                rows.push_back({m.name, family_name(r.family), p, m.d, m.A, m.B, m.C, kappa(m),
                                pass});
            }
        if (format == "json") {
            os << "{\"models\": [";
            for (std::size_t i = 0; i < rows.size(); ++i) {
                const Row& r = rows[i];
                os << (i ? ",\n  " : "\n  ") << "{\"name\": " << json_str(r.name)
                   << ", \"family\": " << json_str(r.family) << ", \"param\": " << r.param
                   << ", \"d\": " << r.d << ", \"A\": " << json_str(rational_to_string(r.A))
                   << ", \"B\": " << json_str(rational_to_string(r.B))
                   << ", \"C\": " << json_str(rational_to_string(r.C))
                   << ", \"kappa\": " << json_str(rational_to_string(r.kap))
                   << ", \"certificate\": " << json_str(pass_str(r.pass)) << "}";
            }
            os << "\n]}\n";
        } else {
            os << std::left << std::setw(8) << "name" << std::setw(12) << "family" << std::setw(7)
               << "param" << std::setw(5) << "d" << std::setw(10) << "A" << std::setw(8) << "B"
               << std::setw(4) << "C" << std::setw(10) << "kappa" << "certificate\n";
            for (const Row& r : rows)
                os << std::left << std::setw(8) << r.name << std::setw(12) << r.family
                   << std::setw(7) << r.param << std::setw(5) << r.d << std::setw(10)
                   << rational_to_string(r.A) << std::setw(8) << rational_to_string(r.B)
                   << std::setw(4) << rational_to_string(r.C) << std::setw(10)
                   << rational_to_string(r.kap) << pass_str(r.pass) << "\n";
        }
    } else {
        struct Row {
            std::string family, spaces, example;
            int models;
            bool pass;
        };
        std::vector<Row> rows;
        for (const auto& r : sweep_ranges()) {
            Row row;
            row.family = family_name(r.family);
            row.models = r.hi - r.lo + 1;
            bool pass = true;
            std::string first, last;
            for (int p = r.lo; p <= r.hi; ++p) {
                SpectralModel m = model(r.family, p);
                if (p == r.lo) first = m.name;
                last = m.name;
                pass = pass && w_verify(m).pass;
            }
            row.spaces = row.models == 1 ? first : first + ".." + last;
            row.example = first;
            row.pass = pass;
            all_pass = all_pass && pass;
            rows.push_back(std::move(row));
        }
        if (format == "json") {
            os << "{\"families\": [";
            for (std::size_t i = 0; i < rows.size(); ++i) {
                const Row& r = rows[i];
                os << (i ? ",\n  " : "\n  ") << "{\"family\": " << json_str(r.family)
                   << ", \"spaces\": " << json_str(r.spaces)
                   << ", \"example\": " << json_str(r.example) << ", \"models\": " << r.models
                   << ", \"certificate\": " << json_str(pass_str(r.pass)) << "}";
            }
            os << "\n]}\n";
        } else {
            os << std::left << std::setw(12) << "family" << std::setw(12) << "spaces"
               << std::setw(9) << "example" << std::setw(8) << "models" << "certificate\n";
            for (const Row& r : rows)
                os << std::left << std::setw(12) << r.family << std::setw(12) << r.spaces
                   << std::setw(9) << r.example << std::setw(8) << r.models << pass_str(r.pass)
                   << "\n";
        }
    }
    write_artifact(opt.out, os.str());
    if (!all_pass) {
        emit_error("W-certificate failed in the catalog");
        return 1;
    }
    return 0;
}

// --- verify ------------------------------------------------------------------

SpectralModel synthetic_model(const std::string& text) {
    int d = 0;
    bool have_d = false, have_A = false, have_B = false, have_R = false;
    Rational A, B, C(0);
    Poly R;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t sep = text.find(',', start);
        std::string tok =
            sep == std::string::npos ? text.substr(start) : text.substr(start, sep - start);
        std::size_t eq = tok.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("synthetic spec needs key=value pairs, got '" + tok + "'");
        std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
        if (key == "d") {
            d = static_cast<int>(parse_rational(val).convert_to<long>());
            have_d = true;
        } else if (key == "A") {
            A = parse_rational(val);
            have_A = true;
        } else if (key == "B") {
            B = parse_rational(val);
            have_B = true;
        } else if (key == "C") {
            C = parse_rational(val);
        } else if (key == "R") {
            R = parse_poly(val);
            have_R = true;
        } else {
            throw std::invalid_argument("unknown synthetic key '" + key + "'");
        }
        if (sep == std::string::npos) break;
        start = sep + 1;
    }
    if (!have_d || !have_A || !have_B || !have_R)
        throw std::invalid_argument("synthetic spec needs d, A, B and R");
    return make_model("synthetic", d, A, B, C, R);
}

int cmd_verify(const Options& opt) {
    const std::string format = check_format(opt.format, {"table", "json"});
    if (opt.space.empty() == opt.synthetic.empty())
        throw std::invalid_argument("give exactly one of a space name or --synthetic");
    if (!opt.space.empty() && opt.space.find('x') != std::string::npos)
        throw std::invalid_argument("verify takes a single space; verify factors separately");
    SpectralModel m = opt.synthetic.empty() ? parse_space(opt.space)
                                            : synthetic_model(opt.synthetic);
    WReport w = w_verify(m);
    std::string checked = w.checked_power < 0
                              ? std::string("constant term")
                              : "coefficient of t^" + std::to_string(w.checked_power);
    std::ostringstream os;
    if (format == "json") {
        os << "{\"space\": " << json_str(m.name) << ", \"d\": " << m.d
           << ", \"alpha\": " << json_str(alpha_string(m))
           << ", \"R\": " << json_str(poly_to_string(m.R, "k"))
           << ", \"shift\": " << json_str(rational_to_string(w.shift))
           << ", \"Q\": " << json_str(poly_to_string(w.Q, "t"))
           << ", \"checked_power\": " << w.checked_power << ", \"checked_coefficient\": "
           << json_str(rational_to_string(w.checked_coefficient))
           << ", \"kappa\": " << json_str(rational_to_string(kappa(m)))
           << ", \"pass\": " << (w.pass ? "true" : "false") << "}\n";
    } else {
        os << "space:        " << m.name << "\n"
           << "d:            " << m.d << "\n"
           << "alpha(k):     " << alpha_string(m) << "\n"
           << "R(k):         " << poly_to_string(m.R, "k") << "\n"
           << "shift:        " << rational_to_string(w.shift) << "\n"
           << "Q(t):         " << poly_to_string(w.Q, "t") << "\n"
           << "checked:      " << checked << " = " << rational_to_string(w.checked_coefficient)
           << "\n"
           << "kappa:        " << rational_to_string(kappa(m)) << "\n"
           << "certificate:  " << pass_str(w.pass) << "\n";
    }
    write_artifact(opt.out, os.str());
    if (!w.pass) {
        emit_error("W-certificate failed for '" + m.name + "'");
        return 1;
    }
    return 0;
}

// --- count -------------------------------------------------------------------

int cmd_count(const Options& opt) {
    const std::string format = check_format(opt.format, {"plain", "json"});
    Rational lambda2 = lambda2_from(opt);
    std::vector<SpectralModel> factors = parse_spaces(opt.space);
    BigInt n = factors.size() == 1
                   ? count_single_fast(factors[0], Threshold(lambda2))
                   : count_product(make_product(std::move(factors)), Threshold(lambda2),
                                   resolve_threads(opt.threads));
    std::ostringstream os;
    if (format == "json")
        os << "{\"space\": " << json_str(opt.space)
           << ", \"lambda2\": " << json_str(rational_to_string(lambda2))
           << ", \"count\": " << n.str() << "}\n";
    else
        os << n.str() << "\n";
    write_artifact(opt.out, os.str());
    return 0;
}

// --- series ------------------------------------------------------------------

int cmd_series(const Options& opt) {
    const std::string format = check_format(opt.format, {"csv", "json"});
    Options o = opt;
    // a bare `series SPACE` samples the first 1000 jumps
    if (o.jumps < 0 && o.lmin < 0 && o.lmax < 0 && o.space.find('x') == std::string::npos)
        o.jumps = 1000;
    CountSeries s = build_series(o, true);
    write_artifact(opt.out, format == "json" ? series_json(s) : series_csv(s));
    return 0;
}

// --- fit ---------------------------------------------------------------------

int cmd_fit(const Options& opt) {
    check_format(opt.format, {"json"});
    Options o = opt;
    if (o.lmin < 0) o.lmin = 50;
    if (o.lmax < 0) o.lmax = 2000;
    double ratio = opt.window_ratio > 0 ? opt.window_ratio : 1.5;
    CountSeries s = build_series(o, false);
    FitReport rep = fit_exponent(s, ratio);
    std::vector<SpectralModel> factors = parse_spaces(opt.space);
    std::string c2 = "null";
    if (factors.size() == 1) c2 = json_num(two_term_coeffs(factors[0]).c2);
    std::ostringstream os;
    os << "{\"space\": " << json_str(s.space) << ", \"d\": " << s.d
       << ", \"c1\": " << json_num(s.c1) << ", \"c2\": " << c2
       << ", \"exponent_fit\": " << json_num(rep.exponent)
       << ", \"r_squared\": " << json_num(rep.r_squared)
       << ", \"window_ratio\": " << json_num(rep.window_ratio) << ", \"windows\": [";
    for (std::size_t i = 0; i < rep.windows.size(); ++i) {
        const FitWindow& w = rep.windows[i];
        os << (i ? ",\n  " : "\n  ") << "{\"lambda_lo\": " << json_num(w.lambda_lo)
           << ", \"lambda_hi\": " << json_num(w.lambda_hi)
           << ", \"lambda_mid\": " << json_num(w.lambda_mid)
           << ", \"envelope\": " << json_num(w.envelope) << ", \"n_points\": " << w.n_points
           << "}";
    }
    os << "\n]}\n";
    write_artifact(opt.out, os.str());
    return 0;
}

// --- sharpness -----------------------------------------------------------------

int cmd_sharpness(const Options& opt) {
    const std::string format = check_format(opt.format, {"table", "csv", "json"});
    if (opt.space.find('x') != std::string::npos)
        throw std::invalid_argument("sharpness samples jump points of a single space");
    if (opt.kmax < 1) throw std::invalid_argument("--kmax must be at least 1");
    SpectralModel m = parse_space(opt.space);
    double ratio = opt.window_ratio > 0 ? opt.window_ratio : 2.0;
    CountSeries s = jump_series(m, 1, to_size(BigInt(opt.kmax), "jump index"));
    auto windows = sharpness_stat(s, ratio);
    std::ostringstream os;
    if (format == "json") {
        os << "{\"space\": " << json_str(m.name) << ", \"d\": " << m.d
           << ", \"c1\": " << json_num(s.c1) << ", \"kmax\": " << opt.kmax
           << ", \"window_ratio\": " << json_num(ratio) << ", \"windows\": [";
        for (std::size_t i = 0; i < windows.size(); ++i) {
            const SharpnessWindow& w = windows[i];
            os << (i ? ",\n  " : "\n  ") << "{\"lambda_lo\": " << json_num(w.lambda_lo)
               << ", \"lambda_hi\": " << json_num(w.lambda_hi)
               << ", \"lambda_mid\": " << json_num(w.lambda_mid)
               << ", \"max_normalized\": " << json_num(w.max_normalized)
               << ", \"n_points\": " << w.n_points << "}";
        }
        os << "\n]}\n";
    } else if (format == "csv") {
        os << "lambda_lo,lambda_hi,lambda_mid,max_normalized,n_points\n";
        for (const SharpnessWindow& w : windows)
            os << fmt17(w.lambda_lo) << ',' << fmt17(w.lambda_hi) << ',' << fmt17(w.lambda_mid)
               << ',' << fmt17(w.max_normalized) << ',' << w.n_points << '\n';
    } else {
        os << std::left << std::setw(24) << "lambda_lo" << std::setw(24) << "lambda_hi"
           << std::setw(24) << "max_normalized" << "points\n";
        for (const SharpnessWindow& w : windows)
            os << std::left << std::setw(24) << fmt17(w.lambda_lo) << std::setw(24)
               << fmt17(w.lambda_hi) << std::setw(24) << fmt17(w.max_normalized) << w.n_points
               << "\n";
    }
    write_artifact(opt.out, os.str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact spectral counting and Weyl-law asymptotics for compact rank one "
                 "symmetric spaces and their products"};
    app.require_subcommand(1);
    Options opt;
    int rc = 0;

    auto* catalog = app.add_subcommand("catalog", "list families and certificate status");
    catalog->add_flag("--param-sweep", opt.param_sweep, "one row per swept model");
    catalog->add_option("--format", opt.format, "table or json");
    catalog->add_option("--out", opt.out, "output path (default stdout)");
    catalog->callback([&]() { rc = cmd_catalog(opt); });

    auto* verify = app.add_subcommand("verify", "check the W-manifold certificate");
    verify->add_option("space", opt.space, "space name, e.g. S3 or RP7");
    verify->add_option("--synthetic", opt.synthetic,
                       "comma-separated model spec, e.g. d=2,A=1,B=0,R=k+1");
    verify->add_option("--format", opt.format, "table or json");
    verify->add_option("--out", opt.out, "output path (default stdout)");
    verify->callback([&]() { rc = cmd_verify(opt); });

    auto* count = app.add_subcommand("count", "count eigenvalues <= lambda^2");
    count->add_option("space", opt.space, "space or product, e.g. S3 or CP2xS3xHP1")->required();
    count->add_option("--lambda2", opt.lambda2_text, "exact threshold lambda^2, e.g. 3/4");
    count->add_option("--lambda", opt.lambda_text, "threshold lambda, parsed exactly");
    count->add_option("--threads", opt.threads, "worker threads (0 = auto)");
    count->add_option("--format", opt.format, "plain or json");
    count->add_option("--out", opt.out, "output path (default stdout)");
    count->callback([&]() { rc = cmd_count(opt); });

    auto* series = app.add_subcommand("series", "counting-function series along a lambda range");
    series->add_option("space", opt.space, "space or product")->required();
    series->add_option("--jumps", opt.jumps, "sample the first N jumps (single spaces)");
    series->add_option("--lmin", opt.lmin, "lambda range start");
    series->add_option("--lmax", opt.lmax, "lambda range end");
    series->add_option("--points", opt.points, "grid points for products (default 2000)");
    series->add_option("--threads", opt.threads, "worker threads (0 = auto)");
    series->add_option("--format", opt.format, "csv or json");
    series->add_option("--out", opt.out, "output path (default stdout)");
    series->callback([&]() { rc = cmd_series(opt); });

    auto* fit = app.add_subcommand("fit", "fit the remainder growth exponent");
    fit->add_option("space", opt.space, "space or product")->required();
    fit->add_option("--lmin", opt.lmin, "lambda range start (default 50)");
    fit->add_option("--lmax", opt.lmax, "lambda range end (default 2000)");
    fit->add_option("--points", opt.points, "grid points for products (default 2000)");
    fit->add_option("--window-ratio", opt.window_ratio, "geometric window ratio (default 1.5)");
    fit->add_option("--threads", opt.threads, "worker threads (0 = auto)");
    fit->add_option("--format", opt.format, "json");
    fit->add_option("--out", opt.out, "output path (default stdout)");
    fit->callback([&]() { rc = cmd_fit(opt); });

    auto* sharp = app.add_subcommand("sharpness", "normalized remainder maxima per window");
    sharp->add_option("space", opt.space, "single space")->required();
    sharp->add_option("--kmax", opt.kmax, "sample jumps k = 1..kmax (default 10000)");
    sharp->add_option("--window-ratio", opt.window_ratio, "geometric window ratio (default 2)");
    sharp->add_option("--format", opt.format, "table, csv or json");
    sharp->add_option("--out", opt.out, "output path (default stdout)");
    sharp->callback([&]() { rc = cmd_sharpness(opt); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        emit_error(std::string(e.get_name()) + ": " + e.what());
        return 1;
    } catch (const std::exception& e) {
        emit_error(e.what());
        return 1;
    }
    return rc;
}
