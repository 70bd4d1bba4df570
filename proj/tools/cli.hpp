#pragma once

//
// Command-line front end. All logic lives here so it can be driven
// in-process by the tests; randutv_cli.cpp only forwards argv.
//
// Exit codes: 0 success, 1 tolerance violated under --check, 2 usage or
// input error, 3 I/O error.
//

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "randutv/randutv.hpp"

namespace randutv::cli {

enum ExitCode { kOk = 0, kToleranceViolated = 1, kUsage = 2, kIo = 3 };

namespace detail {

namespace fs = std::filesystem;

inline std::string fixed(double x, int digits)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, x);
    return buf;
}

inline std::string sci(double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3e", x);
    return buf;
}

// Writes next to the target and renames, so readers never see a partial file.
inline void write_atomic(const fs::path& path, const std::string& contents)
{
    std::error_code ec;
    if (path.has_parent_path())
        fs::create_directories(path.parent_path(), ec);
    if (ec)
        throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os)
            throw IoError("cannot open " + tmp.string() + " for writing");
        os << contents;
        os.flush();
        if (!os)
            throw IoError("write failed for " + tmp.string());
    }
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot rename into " + path.string());
    }
}

struct Input {
    std::string in_path;
    std::string gen_spec;
};

struct LoadedMatrix {
    Matrix a;
    std::optional<std::vector<double>> known_sigma;
    std::string label;
};

inline LoadedMatrix load(const Input& in)
{
    if (in.in_path.empty() == in.gen_spec.empty())
        throw InputError("exactly one of --in and --gen is required");
    if (!in.in_path.empty())
        return {mm::read_file(in.in_path), std::nullopt, in.in_path};
    GeneratedMatrix g = generate(parse_matrix_spec(in.gen_spec));
    return {std::move(g.a), std::move(g.known_sigma), in.gen_spec};
}

inline void add_input(CLI::App* cmd, Input& in)
{
    cmd->add_option("--in", in.in_path, "Matrix Market input file");
    cmd->add_option("--gen", in.gen_spec, "generator spec, e.g. fast-decay:n=400,seed=7");
}

inline std::vector<std::uint64_t> seeds_of(const std::vector<std::string>& text)
{
    std::vector<std::uint64_t> out;
    for (const auto& s : text)
        out.push_back(parse_seed(s));
    return out;
}

struct Common {
    Input input;
    std::size_t b = 32;
    std::size_t q = 2;
    std::size_t p = 0;
    std::string seed = "0";
    std::string norm = "spectral";
    bool no_ortho = false;
    bool no_reortho = false;
    std::string out_dir = ".";
    bool check = false;
};

inline int cmd_factorize(const Common& c, std::ostream& out)
{
    const LoadedMatrix in = load(c.input);
    const std::size_t m = in.a.rows();
    const std::size_t n = in.a.cols();
    if (c.b < 1)
        throw InputError("--b must be >= 1");
    UtvOptions opt;
    opt.block_size = c.b;
    opt.power_steps = c.q;
    opt.oversampling = c.p;
    opt.build_orthonormal = !c.no_ortho;
    opt.reorthonormalize = !c.no_reortho;
    RandomStream stream(parse_seed(c.seed));
    const UtvFactorization f = rand_utv(in.a, opt, stream);

    nlohmann::ordered_json meta;
    meta["input"] = in.label;
    meta["m"] = m;
    meta["n"] = n;
    meta["b"] = c.b;
    meta["q"] = c.q;
    meta["p"] = c.p;
    meta["seed"] = f.seed;
    meta["build_ortho"] = !c.no_ortho;
    meta["reorthonormalize"] = !c.no_reortho;
    meta["steps"] = f.steps;

    bool ok = true;
    const double anorm = frobenius_norm(in.a);
    if (!c.no_ortho) {
        const Matrix rec = multiply(multiply(f.u, f.t), f.v, Op::None, Op::Trans);
        const double resid = frobenius_norm(subtract(in.a, rec)) / (anorm > 0.0 ? anorm : 1.0);
        const double ou = orthogonality_error(f.u);
        const double ov = orthogonality_error(f.v);
        meta["reconstruction_residual"] = resid;
        meta["orthogonality_u"] = ou;
        meta["orthogonality_v"] = ov;
        ok = resid <= 1e-12 && ou <= 1e-12 * std::sqrt(double(m)) && ov <= 1e-12 * std::sqrt(double(n));
    } else {
        meta["reconstruction_residual"] = nullptr;
        meta["orthogonality_u"] = nullptr;
        meta["orthogonality_v"] = nullptr;
    }
    const std::vector<double> diag = diagonal_of(f.t);
    const std::size_t head = std::min<std::size_t>(diag.size(), 256);
    meta["diag_head"] = std::vector<double>(diag.begin(), diag.begin() + std::ptrdiff_t(head));
    if (in.known_sigma)
        meta["known_sigma_head"] =
            std::vector<double>(in.known_sigma->begin(), in.known_sigma->begin() + std::ptrdiff_t(head));

    // everything is computed before the first file is touched
    const fs::path dir(c.out_dir);
    const std::string t_text = mm::to_string(f.t);
    std::string u_text, v_text;
    if (!c.no_ortho) {
        u_text = mm::to_string(f.u);
        v_text = mm::to_string(f.v);
    }
    write_atomic(dir / "T.mtx", t_text);
    if (!c.no_ortho) {
        write_atomic(dir / "U.mtx", u_text);
        write_atomic(dir / "V.mtx", v_text);
    }
    write_atomic(dir / "factorization.json", meta.dump(2) + "\n");

    out << "factorized " << m << "x" << n << " b=" << c.b << " q=" << c.q << " p=" << c.p << " seed=" << f.seed
        << "\n";
    if (!c.no_ortho)
        out << "reconstruction " << sci(meta["reconstruction_residual"].get<double>()) << "  orth(U) "
            << sci(meta["orthogonality_u"].get<double>()) << "  orth(V) " << sci(meta["orthogonality_v"].get<double>())
            << "\n";
    out << "wrote " << (dir / "T.mtx").string() << (c.no_ortho ? "" : ", U.mtx, V.mtx") << ", factorization.json\n";
    return c.check && !ok ? kToleranceViolated : kOk;
}

struct ErrorsArgs {
    std::vector<std::size_t> qs{0, 1, 2};
    std::vector<std::string> seeds{"0"};
    std::vector<std::string> methods{"svd", "cpqr", "qlp", "randutv"};
    std::vector<std::size_t> ks;
    std::vector<std::string> norms;
};

inline int cmd_errors(const Common& c, const ErrorsArgs& e, std::ostream& out)
{
    if (!c.input.in_path.empty() || c.input.gen_spec.empty())
        throw InputError("errors needs --gen (a generator spec); --in is not supported here");
    ExperimentSpec spec;
    spec.matrix = parse_matrix_spec(c.input.gen_spec);
    spec.n = spec.matrix.n;
    spec.b = c.b;
    spec.qs = e.qs;
    spec.p = c.p;
    spec.seeds = seeds_of(e.seeds);
    spec.methods = e.methods;
    spec.ks = e.ks;
    spec.norms.clear();
    if (e.norms.empty())
        spec.norms.push_back(parse_norm(c.norm));
    for (const auto& s : e.norms)
        spec.norms.push_back(parse_norm(s));

    const ExperimentResult res = run_experiment(spec);

    bool ok = true;
    std::vector<std::vector<double>> spectra;
    for (std::uint64_t seed : spec.seeds) {
        TestMatrixSpec ms = spec.matrix;
        ms.seed = seed;
        spectra.push_back(reference_spectrum(generate(ms)));
    }
    for (const auto& r : res.rows) {
        const auto at = std::find(spec.seeds.begin(), spec.seeds.end(), r.seed) - spec.seeds.begin();
        const std::vector<double>& sigma = spectra[std::size_t(at)];
        if (r.abs_err < optimal_error(sigma, r.k, r.norm) - 1e-10 * sigma.front())
            ok = false;
        if (r.method == "svd" && r.rel_err_pct && std::abs(*r.rel_err_pct - 100.0) > 1e-6)
            ok = false;
    }

    std::string jsonl;
    for (const auto& s : res.summary) {
        nlohmann::ordered_json j;
        j["family"] = s.family;
        j["method"] = s.method;
        j["k"] = s.k;
        j["norm"] = norm_name(s.norm);
        j["samples"] = s.samples;
        j["median_abs_err"] = s.median_abs_err;
        if (s.median_rel_err_pct)
            j["median_rel_err_pct"] = *s.median_rel_err_pct;
        else
            j["median_rel_err_pct"] = nullptr;
        jsonl += j.dump() + "\n";
    }
    const fs::path dir(c.out_dir);
    const std::string csv = to_csv(res.rows);
    write_atomic(dir / "errors.csv", csv);
    write_atomic(dir / "errors_summary.jsonl", jsonl);
    out << "wrote " << res.rows.size() << " rows to " << (dir / "errors.csv").string() << " and "
        << res.summary.size() << " summary lines to " << (dir / "errors_summary.jsonl").string() << "\n";
    return c.check && !ok ? kToleranceViolated : kOk;
}

inline int cmd_singvals(const Common& c, const std::vector<std::size_t>& qs, std::ostream& out)
{
    const LoadedMatrix in = load(c.input);
    const std::size_t r = std::min(in.a.rows(), in.a.cols());
    const std::vector<double> oracle = singular_values(in.a);
    const std::vector<double> sigma = in.known_sigma ? *in.known_sigma : oracle;
    GeneratedMatrix g;
    g.a = in.a;
    const auto study = diag_study(g, sigma, c.b, qs, algorithm_seed(parse_seed(c.seed)));

    bool ok = true;
    double oracle_err = 0.0;
    if (in.known_sigma) {
        for (std::size_t i = 0; i < r; ++i)
            oracle_err = std::max(oracle_err, std::abs(oracle[i] - sigma[i]) / sigma[i]);
        ok = oracle_err <= 1e-11;
    }

    std::string csv = "i,sigma";
    for (const auto& s : study)
        csv += "," + s.method;
    csv += "\n";
    for (std::size_t i = 0; i < r; ++i) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", sigma[i]);
        csv += std::to_string(i + 1) + "," + buf;
        for (const auto& s : study) {
            std::snprintf(buf, sizeof buf, "%.17g", std::abs(s.diagonal[i]));
            csv += std::string(",") + buf;
        }
        csv += "\n";
    }
    const fs::path dir(c.out_dir);
    write_atomic(dir / "singvals.csv", csv);

    out << "method            median rel diag err (%)\n";
    for (const auto& s : study) {
        std::string name = s.method;
        name.resize(18, ' ');
        out << name << fixed(s.median_rel_err_pct, 4) << "\n";
    }
    if (in.known_sigma)
        out << "oracle vs known spectrum: max rel err " << sci(oracle_err) << "\n";
    out << "wrote " << (dir / "singvals.csv").string() << "\n";
    return c.check && !ok ? kToleranceViolated : kOk;
}

inline int cmd_theorem_check(const Common& c, std::ostream& out)
{
    const LoadedMatrix in = load(c.input);
    RandomStream stream(parse_seed(c.seed));
    const TheoremCheck t = verify_theorem(in.a, c.b, c.q, stream, !c.no_reortho);
    const double gap_a = std::abs(t.lhs_a - t.rhs_a);
    const double gap_b = std::abs(t.lhs_b - t.rhs_b);
    const double tol = 1e-10 * t.sigma1;
    const bool part_b = in.a.rows() >= in.a.cols();
    out << "sigma1   " << sci(t.sigma1) << "\n";
    out << "(a) |A - AQQ'|  = " << sci(t.lhs_a) << "   |[T12;T22]| = " << sci(t.rhs_a) << "   gap " << sci(gap_a)
        << "\n";
    out << "(b) |A - WW'A|  = " << sci(t.lhs_b) << "   |T22|       = " << sci(t.rhs_b) << "   gap " << sci(gap_b)
        << (part_b ? "" : "   (not checked, m < n)") << "\n";
    out << "tolerance " << sci(tol) << "\n";
    const bool ok = gap_a <= tol && (!part_b || gap_b <= tol);
    return c.check && !ok ? kToleranceViolated : kOk;
}

inline int cmd_flops(std::size_t m, std::size_t n, std::size_t q, bool check, std::ostream& out)
{
    if (n < 1 || m < n)
        throw InputError("flops: need m >= n >= 1");
    const double dm = double(m), dn = double(n), dq = double(q);
    const double r = flops_randutv(dm, dn, dq);
    const double p = flops_cpqr(dm, dn);
    out << "m=" << m << " n=" << n << " q=" << q << "\n";
    out << "randutv      " << sci(r) << "\n";
    out << "cpqr         " << sci(p) << "\n";
    out << "bidiag       " << sci(flops_bidiag(dm, dn)) << "\n";
    out << "bidiag_tall  " << sci(flops_bidiag_tall(dm, dn)) << "\n";
    const Fraction exact = flop_ratio_exact(std::int64_t(m), std::int64_t(n), std::int64_t(q));
    out << "ratio randutv/cpqr " << fixed(r / p, 2) << " (exact " << exact.num << "/" << exact.den << ")\n";
    const bool ok = m != n || exact == Fraction{std::int64_t(3 + q), 1};
    return check && !ok ? kToleranceViolated : kOk;
}

inline int cmd_gen(const Common& c, const std::string& out_file, std::ostream& out)
{
    if (c.input.gen_spec.empty())
        throw InputError("gen needs --gen");
    const GeneratedMatrix g = generate(parse_matrix_spec(c.input.gen_spec));
    const fs::path path = out_file.empty() ? fs::path(c.out_dir) / "A.mtx" : fs::path(out_file);
    const std::string text = mm::to_string(g.a);
    std::string sigma_text;
    if (g.known_sigma) {
        char buf[40];
        for (double s : *g.known_sigma) {
            std::snprintf(buf, sizeof buf, "%.17g\n", s);
            sigma_text += buf;
        }
    }
    write_atomic(path, text);
    if (g.known_sigma) {
        fs::path sp = path;
        sp.replace_extension(".sigma.txt");
        write_atomic(sp, sigma_text);
    }
    out << "wrote " << path.string() << " (" << g.a.rows() << "x" << g.a.cols() << ", " << family_name(g.spec.family)
        << ")\n";
    return kOk;
}

} // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    CLI::App app{"Randomized UTV factorization and accuracy studies"};
    app.require_subcommand(1);

    detail::Common c;
    detail::ErrorsArgs e;
    std::vector<std::size_t> sv_qs{0, 1, 2};
    std::size_t fm = 0, fn = 0;
    std::string gen_out;

    auto* factorize = app.add_subcommand("factorize", "compute A = U T V' and write U.mtx, T.mtx, V.mtx");
    detail::add_input(factorize, c.input);
    factorize->add_option("--b", c.b, "block size")->capture_default_str();
    factorize->add_option("--q", c.q, "power iterations")->capture_default_str();
    factorize->add_option("--p", c.p, "oversampling")->capture_default_str();
    factorize->add_option("--seed", c.seed, "decimal or 0x-hex")->capture_default_str();
    factorize->add_flag("--no-ortho", c.no_ortho, "do not accumulate U and V");
    factorize->add_flag("--no-reortho", c.no_reortho, "skip orthonormalization inside power iteration");
    factorize->add_option("--out-dir", c.out_dir)->capture_default_str();
    factorize->add_flag("--check", c.check, "exit 1 if reconstruction or orthogonality tolerances fail");

    auto* errors = app.add_subcommand("errors", "rank-k error curves, CSV plus JSON-lines medians");
    detail::add_input(errors, c.input);
    errors->add_option("--b", c.b)->capture_default_str();
    errors->add_option("--q", e.qs, "power iteration counts")->delimiter(',')->capture_default_str();
    errors->add_option("--p", c.p)->capture_default_str();
    errors->add_option("--seed", e.seeds, "matrix seeds")->delimiter(',')->capture_default_str();
    errors->add_option("--methods", e.methods, "svd,cpqr,qlp,randutv")->delimiter(',')->capture_default_str();
    errors->add_option("--k", e.ks, "ranks (default: multiples of b)")->delimiter(',');
    errors->add_option("--norm", e.norms, "spectral|frobenius")->delimiter(',');
    errors->add_option("--out-dir", c.out_dir)->capture_default_str();
    errors->add_flag("--check", c.check, "exit 1 if any error beats the optimal one");

    auto* singvals = app.add_subcommand("singvals", "diagonal entries versus singular values");
    detail::add_input(singvals, c.input);
    singvals->add_option("--b", c.b)->capture_default_str();
    singvals->add_option("--q", sv_qs)->delimiter(',')->capture_default_str();
    singvals->add_option("--seed", c.seed)->capture_default_str();
    singvals->add_option("--out-dir", c.out_dir)->capture_default_str();
    singvals->add_flag("--check", c.check, "exit 1 if the oracle misses a known spectrum by > 1e-11");

    auto* theorem = app.add_subcommand("theorem-check", "compare range-finder errors with the blocks of T");
    detail::add_input(theorem, c.input);
    theorem->add_option("--b", c.b)->capture_default_str();
    theorem->add_option("--q", c.q)->capture_default_str();
    theorem->add_option("--seed", c.seed)->capture_default_str();
    theorem->add_flag("--no-reortho", c.no_reortho);
    theorem->add_flag("--check", c.check, "exit 1 if a gap exceeds 1e-10 sigma1");

    auto* flops = app.add_subcommand("flops", "operation-count model");
    flops->add_option("--m", fm)->required();
    flops->add_option("--n", fn, "defaults to m");
    flops->add_option("--q", c.q)->capture_default_str();
    flops->add_flag("--check", c.check, "exit 1 unless the square-case ratio is exactly 3 + q");

    auto* gen = app.add_subcommand("gen", "write a test matrix in Matrix Market format");
    gen->add_option("--gen", c.input.gen_spec)->required();
    gen->add_option("--out", gen_out, "output file (default <out-dir>/A.mtx)");
    gen->add_option("--out-dir", c.out_dir)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& ex) {
        const int code = app.exit(ex, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*factorize)
            return detail::cmd_factorize(c, out);
        if (*errors)
            return detail::cmd_errors(c, e, out);
        if (*singvals)
            return detail::cmd_singvals(c, sv_qs, out);
        if (*theorem)
            return detail::cmd_theorem_check(c, out);
        if (*flops)
            return detail::cmd_flops(fm, fn == 0 ? fm : fn, c.q, c.check, out);
        if (*gen)
            return detail::cmd_gen(c, gen_out, out);
    } catch (const IoError& ex) {
        err << "error: " << ex.what() << "\n";
        return kIo;
    } catch (const Error& ex) {
        err << "error: " << ex.what() << "\n";
        return kUsage;
    } catch (const std::filesystem::filesystem_error& ex) {
        err << "error: " << ex.what() << "\n";
        return kIo;
    }
    return kUsage;
}

} // namespace randutv::cli
