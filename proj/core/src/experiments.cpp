#include "axihelm/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "axihelm/linalg.hpp"

namespace axihelm {

using nlohmann::json;

std::unique_ptr<GeneratingCurve> CurveSpec::make() const {
    if (kind == "sphere") return std::make_unique<SphereCurve>(radius);
    if (kind == "star") return std::make_unique<StarCurve>(amplitude, frequency);
    throw ConfigError("unknown curve kind: " + kind);
}

void RunConfig::validate() const {
    if (mode_n < -128 || mode_n > 128) throw ConfigError("mode_n out of range");
    if (n_pan < 2) throw ConfigError("n_pan must be >= 2");
    if (N_ratio < 1 || N_ratio > 64) throw ConfigError("N_ratio out of range [1, 64]");
    if (!sweep.empty()) {
        for (size_t i = 0; i + 1 < sweep.size(); ++i)
            if (sweep[i] >= sweep[i + 1]) throw ConfigError("sweep list must be strictly increasing");
        if (sweep.front() < 2) throw ConfigError("sweep entries must be >= 2");
    }
    if (bracket && !(bracket->first < bracket->second))
        throw ConfigError("bracket must satisfy k_low < k_up");
    if (!bracket && !(k > 0.0)) throw ConfigError("wavenumber must be positive");
    if (window.nx < 2 || window.nz < 2) throw ConfigError("window grid must be at least 2x2");
    if (oracle_l < 0 || oracle_m < 1) throw ConfigError("oracle indices require l >= 0, m >= 1");
}

RunConfig parse_config_json(const std::string& text) {
    json j = json::parse(text);
    RunConfig c;
    const std::map<std::string, ExperimentKind> kinds = {
        {"solve", ExperimentKind::Solve},
        {"eigensearch", ExperimentKind::EigenSearch},
        {"field", ExperimentKind::FieldGridKind},
        {"sweep", ExperimentKind::ConvergenceSweep},
        {"oracle", ExperimentKind::Oracle}};
    if (j.contains("experiment")) {
        auto it = kinds.find(j["experiment"].get<std::string>());
        if (it == kinds.end()) throw ConfigError("unknown experiment kind");
        c.experiment = it->second;
    }
    if (j.contains("curve")) {
        const auto& cj = j["curve"];
        if (cj.contains("kind")) c.curve.kind = cj["kind"].get<std::string>();
        if (cj.contains("radius")) c.curve.radius = cj["radius"].get<double>();
        if (cj.contains("amplitude")) c.curve.amplitude = cj["amplitude"].get<double>();
        if (cj.contains("frequency")) c.curve.frequency = cj["frequency"].get<double>();
    }
    if (j.contains("mode_n")) c.mode_n = j["mode_n"].get<int>();
    if (j.contains("k")) c.k = j["k"].get<double>();
    if (j.contains("bracket")) {
        auto b = j["bracket"];
        c.bracket = std::make_pair(b.at(0).get<double>(), b.at(1).get<double>());
    }
    if (j.contains("n_pan")) c.n_pan = j["n_pan"].get<int>();
    if (j.contains("sweep")) c.sweep = j["sweep"].get<std::vector<int>>();
    if (j.contains("N_ratio")) c.N_ratio = j["N_ratio"].get<int>();
    if (j.contains("tol_k")) c.tol_k = j["tol_k"].get<double>();
    if (j.contains("point_source")) {
        const auto& p = j["point_source"];
        if (p.contains("rc")) c.source.rc = p["rc"].get<double>();
        if (p.contains("z")) c.source.z = p["z"].get<double>();
        if (p.contains("strength")) c.source.strength = p["strength"].get<double>();
    }
    if (j.contains("window")) {
        const auto& w = j["window"];
        if (w.contains("x0")) c.window.x0 = w["x0"].get<double>();
        if (w.contains("x1")) c.window.x1 = w["x1"].get<double>();
        if (w.contains("z0")) c.window.z0 = w["z0"].get<double>();
        if (w.contains("z1")) c.window.z1 = w["z1"].get<double>();
        if (w.contains("nx")) c.window.nx = w["nx"].get<int>();
        if (w.contains("nz")) c.window.nz = w["nz"].get<int>();
    }
    if (j.contains("subsample")) c.subsample = j["subsample"].get<int>();
    if (j.contains("oracle_l")) c.oracle_l = j["oracle_l"].get<int>();
    if (j.contains("oracle_m")) c.oracle_m = j["oracle_m"].get<int>();
    if (j.contains("outputs")) {
        const auto& o = j["outputs"];
        if (o.contains("table")) c.table_path = o["table"].get<std::string>();
        if (o.contains("grid")) c.grid_path = o["grid"].get<std::string>();
    }
    c.validate();
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_json(ss.str());
}

std::vector<double> spherical_bessel_j(double x, int lmax) {
    std::vector<double> j(lmax + 1, 0.0);
    if (x == 0.0) {
        j[0] = 1.0;
        return j;
    }
    const double j0 = std::sin(x) / x;
    if (x > lmax + 10) {
        j[0] = j0;
        if (lmax >= 1) j[1] = std::sin(x) / (x * x) - std::cos(x) / x;
        for (int l = 1; l < lmax; ++l) j[l + 1] = (2 * l + 1) / x * j[l] - j[l - 1];
        return j;
    }
    // downward recurrence normalized on j_0
    const int start = lmax + 20 + static_cast<int>(std::ceil(1.5 * std::sqrt(double(lmax) + 1)));
    double jp = 0.0, jc = 1e-300;
    std::vector<double> tmp(lmax + 1, 0.0);
    for (int l = start; l >= 1; --l) {
        const double jm = (2 * l + 1) / x * jc - jp;
        jp = jc;
        jc = jm;
        if (l - 1 <= lmax) tmp[l - 1] = jc;
        if (std::abs(jc) > 1e270) {
            jp *= 1e-280;
            jc *= 1e-280;
            for (auto& v : tmp) v *= 1e-280;
        }
    }
    const double scale = j0 / jc;
    for (int l = 0; l <= lmax; ++l) j[l] = tmp[l] * scale;
    return j;
}

namespace {

double bessel_j_derivative(int l, double x) {
    auto j = spherical_bessel_j(x, l + 1);
    if (l == 0) return -j[1];
    return j[l - 1] - (l + 1) / x * j[l];
}

}  // namespace

double sphere_bessel_reference(int l, int m) {
    if (l < 0 || m < 1) throw ConfigError("sphere_bessel_reference: need l >= 0, m >= 1");
    // scan for sign changes of d j_l/dx, then bisect
    const double step = 0.05;
    double x = std::max(0.5, 0.2 * l);
    double prev = bessel_j_derivative(l, x);
    int found = 0;
    for (int it = 0; it < 2000000; ++it) {
        const double xn = x + step;
        const double cur = bessel_j_derivative(l, xn);
        if (prev == 0.0) prev = -cur;
        if (prev * cur < 0.0) {
            ++found;
            if (found == m) {
                double a = x, b = xn;
                for (int b_it = 0; b_it < 200; ++b_it) {
                    const double mid = 0.5 * (a + b);
                    const double fm = bessel_j_derivative(l, mid);
                    if (prev * fm <= 0.0)
                        b = mid;
                    else
                        a = mid;
                    if (b - a < 1e-16 * b) break;
                }
                return 0.5 * (a + b);
            }
        }
        prev = cur;
        x = xn;
    }
    throw ConfigError("sphere_bessel_reference: root scan failed");
}

namespace {

CurvePoint pseudo_point(double rc, double z) {
    CurvePoint p;
    p.rc = rc;
    p.z = z;
    p.speed = 1.0;
    p.nu_z = 1.0;
    return p;
}

std::vector<Vec2> window_points(const WindowSpec& w) {
    std::vector<Vec2> pts;
    pts.reserve(static_cast<size_t>(w.nx) * w.nz);
    for (int i = 0; i < w.nx; ++i) {
        const double x = w.x0 + (w.x1 - w.x0) * i / (w.nx - 1.0);
        for (int j = 0; j < w.nz; ++j) {
            const double z = w.z0 + (w.z1 - w.z0) * j / (w.nz - 1.0);
            pts.push_back({std::abs(x), z});
        }
    }
    return pts;
}

double rel_l2(const Eigen::VectorXcd& a, const Eigen::VectorXcd& ref, const Mesh& mesh) {
    double num = 0.0, den = 0.0;
    for (int i = 0; i < a.size(); ++i) {
        const double w = mesh.grid.points[i].speed * mesh.grid.weights[i];
        num += std::norm(a(i) - ref(i)) * w;
        den += std::norm(ref(i)) * w;
    }
    return std::sqrt(num / den);
}

}  // namespace

PointSourceResult run_point_source_experiment(const RunConfig& config) {
    auto curve = config.curve.make();
    const CurvePoint rp = pseudo_point(config.source.rc, config.source.z);
    {
        // reject sources inside the volume
        Mesh probe = build_mesh(*curve, 16);
        Vec2 rpv{config.source.rc, config.source.z};
        auto g = make_field_grid(*curve, probe, std::span<const Vec2>(&rpv, 1));
        if (g.points[0].inside) throw ConfigError("point source must lie outside the volume");
    }

    std::vector<int> panlist = config.sweep.empty() ? std::vector<int>{config.n_pan} : config.sweep;

    PointSourceResult result;
    result.table.header = {"n_pan", "points", "cond",     "avg_err",
                           "max_interior", "max_near", "l2_u", "l2_tdu"};

    auto candidates = window_points(config.window);

    for (int n_pan : panlist) {
        const int N = config.N_ratio * n_pan;
        const int Nref = N + 64;
        SystemMatrix sys = assemble(*curve, n_pan, config.mode_n, config.k, config.N_ratio);
        const Mesh& mesh = *sys.mesh;
        const int m = mesh.grid.size();

        CloseKernelEvaluator ev_knu(KernelKind::NormalDerivative, config.mode_n, config.k,
                                    AzimuthalTransform::get(Nref));
        CloseKernelEvaluator ev_s(KernelKind::SingleLayer, config.mode_n, config.k,
                                  AzimuthalTransform::get(Nref));
        CloseKernelEvaluator ev_kt(KernelKind::TangentialDerivative, config.mode_n, config.k,
                                   AzimuthalTransform::get(Nref));

        Eigen::VectorXcd f(m), u_ref(m), tdu_ref(m);
        for (int i = 0; i < m; ++i) {
            const auto& pt = mesh.grid.points[i];
            f(i) = config.source.strength * ev_knu.distant_value(pt, rp);
            u_ref(i) = config.source.strength * ev_s.distant_value(pt, rp);
            tdu_ref(i) = config.source.strength * ev_kt.distant_value(pt, rp);
        }
        ModalSolution sol = solve_neumann(sys, f);

        Eigen::MatrixXcd S_map = boundary_map_matrix(KernelKind::SingleLayer, *curve, mesh,
                                                      config.mode_n, config.k, N);
        Eigen::VectorXcd u_gamma = S_map * sol.rho;
        Eigen::VectorXcd tdu = eval_tangential_derivative(*curve, sol, N);

        PointSourceRun run;
        run.n_pan = n_pan;
        run.cond = cond2(sys.A);
        run.l2_err_u = rel_l2(u_gamma, u_ref, mesh);
        run.l2_err_tdu = rel_l2(tdu, tdu_ref, mesh);

        FieldGrid grid = make_field_grid(*curve, mesh, candidates);
        std::vector<int> inside_idx;
        for (size_t i = 0; i < grid.points.size(); ++i)
            if (grid.points[i].inside) inside_idx.push_back(static_cast<int>(i));
        // deterministic subsample
        std::vector<int> chosen;
        if (config.subsample > 0 && static_cast<int>(inside_idx.size()) > config.subsample) {
            const double stride = double(inside_idx.size()) / config.subsample;
            for (int s = 0; s < config.subsample; ++s)
                chosen.push_back(inside_idx[static_cast<size_t>(s * stride)]);
        } else {
            chosen = inside_idx;
        }
        FieldGrid sub;
        for (int idx : chosen) sub.points.push_back(grid.points[idx]);
        Eigen::VectorXcd u_field = eval_field(*curve, sol, sub, N);

        double panel_len = 0.0;
        for (int p = 0; p < n_pan; ++p) {
            double len = 0.0;
            for (int j = 0; j < mesh.grid.n_pt; ++j) {
                const int g = p * mesh.grid.n_pt + j;
                len += mesh.grid.points[g].speed * mesh.grid.weights[g];
            }
            panel_len = std::max(panel_len, len);
        }

        double sum_err = 0.0;
        int count = 0;
        result.grid.header = {"rc", "z", "re_u", "im_u", "log10_error"};
        const bool record_grid = (n_pan == panlist.back());
        if (record_grid) result.grid.rows.clear();
        for (size_t s = 0; s < sub.points.size(); ++s) {
            const cplx u_exact = config.source.strength *
                                 ev_s.distant_value_offcurve(sub.points[s].r, rp);
            const double err = std::abs(u_field(static_cast<int>(s)) - u_exact);
            sum_err += err;
            ++count;
            if (sub.points[s].panel_distance < panel_len)
                run.max_near_error = std::max(run.max_near_error, err);
            else
                run.max_interior_error = std::max(run.max_interior_error, err);
            if (record_grid)
                result.grid.rows.push_back({sub.points[s].r.rc, sub.points[s].r.z,
                                            u_field(static_cast<int>(s)).real(),
                                            u_field(static_cast<int>(s)).imag(),
                                            std::log10(std::max(err, 1e-300))});
        }
        run.avg_abs_error = count ? sum_err / count : 0.0;
        run.n_points = count;

        result.runs.push_back(run);
        result.table.rows.push_back({double(n_pan), double(m), run.cond, run.avg_abs_error,
                                     run.max_interior_error, run.max_near_error, run.l2_err_u,
                                     run.l2_err_tdu});
    }

    if (!config.table_path.empty()) write_csv(result.table, config.table_path);
    if (!config.grid_path.empty()) write_csv(result.grid, config.grid_path);
    return result;
}

EigenExperimentResult run_eigen_experiment(const RunConfig& config) {
    if (!config.bracket) throw ConfigError("eigen experiment requires a bracket");
    auto curve = config.curve.make();
    const bool is_sphere = config.curve.kind == "sphere";

    EigenExperimentResult result;
    result.table.header = {"n_pan", "points", "cond", "err_k", "err_u"};
    if (is_sphere) result.k_reference = sphere_bessel_reference(config.oracle_l, config.oracle_m);

    std::vector<int> panlist = config.sweep.empty() ? std::vector<int>{config.n_pan} : config.sweep;

    // companion meshes (~50% more points) for the estimated-error protocol
    std::vector<int> all_meshes = panlist;
    std::map<int, int> companion;
    if (!is_sphere) {
        for (int np : panlist) {
            const int comp = static_cast<int>(std::lround(std::ceil(1.5 * np)));
            companion[np] = comp;
            all_meshes.push_back(comp);
        }
    }
    std::sort(all_meshes.begin(), all_meshes.end());
    all_meshes.erase(std::unique(all_meshes.begin(), all_meshes.end()), all_meshes.end());

    // modest sample of interior points for the pointwise-error protocol
    WindowSpec probe_win = config.window;
    probe_win.nx = std::min(config.window.nx, 24);
    probe_win.nz = std::min(config.window.nz, 24);
    auto probe_pts = window_points(probe_win);

    struct MeshRun {
        double k_star = 0.0, cond = 0.0, sigma_min = 0.0;
        Eigen::VectorXcd field;  // at probe points (normalized)
        double max_abs_u = 0.0;
        std::shared_ptr<NormalizedEigenfunction> nf;
        std::shared_ptr<Mesh> mesh;
    };
    std::map<int, MeshRun> runs;

    for (int n_pan : all_meshes) {
        MeshRun mr;
        EigenSearchResult search =
            find_eigenwavenumber(*curve, n_pan, config.mode_n, config.bracket->first,
                                 config.bracket->second, config.N_ratio, config.tol_k);
        mr.k_star = search.k_star;
        mr.cond = search.cond_at_star;
        mr.sigma_min = search.sigma_min;

        const int N = config.N_ratio * n_pan;
        auto mesh = std::make_shared<Mesh>(build_mesh(*curve, n_pan));
        mr.mesh = mesh;
        Eigen::MatrixXcd S_map = boundary_map_matrix(KernelKind::SingleLayer, *curve, *mesh,
                                                      config.mode_n, search.k_star, N);
        Eigen::VectorXcd u_gamma = S_map * search.rho;
        ModalSolution hom;
        hom.mode_n = config.mode_n;
        hom.k = search.k_star;
        hom.rho = search.rho;
        hom.mesh = mesh;
        Eigen::VectorXcd tdu = eval_tangential_derivative(*curve, hom, N);
        auto nf = std::make_shared<NormalizedEigenfunction>(
            normalize_eigenfunction(u_gamma, tdu, search.rho, search.k_star, config.mode_n, *mesh));
        mr.nf = nf;

        FieldGrid fgrid = make_field_grid(*curve, *mesh, probe_pts);
        ModalSolution scaled = hom;
        scaled.rho = nf->rho;
        mr.field = eval_field(*curve, scaled, fgrid, N);
        for (int i = 0; i < mr.field.size(); ++i)
            if (fgrid.points[i].inside)
                mr.max_abs_u = std::max(mr.max_abs_u, std::abs(mr.field(i)));
        runs[n_pan] = std::move(mr);
    }

    for (int n_pan : panlist) {
        const MeshRun& mr = runs[n_pan];
        EigenRun er;
        er.n_pan = n_pan;
        er.k_star = mr.k_star;
        er.cond = mr.cond;
        er.sigma_min = mr.sigma_min;
        double kref = result.k_reference;
        if (!is_sphere) {
            // reference: converged value from the finest mesh in the union
            kref = runs[all_meshes.back()].k_star;
            if (result.k_reference == 0.0) result.k_reference = kref;
        }
        er.err_k = std::abs(mr.k_star - kref) / std::abs(kref);
        if (is_sphere) {
            // boundary L2 error against the analytic profile
            const Mesh& mesh = *mr.mesh;
            const double kk = mr.k_star;
            Eigen::VectorXcd ref(mesh.grid.size());
            for (int i = 0; i < mesh.grid.size(); ++i)
                ref(i) = std::sqrt(3.0) * kk / std::sqrt(2.0 * kk * kk - 4.0) *
                         std::sin(mesh.grid.points[i].t);
            const double e_plus = rel_l2(mr.nf->u_gamma, ref, mesh);
            const double e_minus = rel_l2(-mr.nf->u_gamma, ref, mesh);
            er.err_u = std::min(e_plus, e_minus);
        } else {
            // estimated pointwise error against the ~50% finer companion
            const MeshRun& fine = runs[companion[n_pan]];
            double acc = 0.0;
            int cnt = 0;
            for (int i = 0; i < mr.field.size(); ++i) {
                const bool ok = std::isfinite(mr.field(i).real()) &&
                                std::isfinite(fine.field(i).real());
                if (!ok) continue;
                double d = std::abs(mr.field(i) - fine.field(i));
                d = std::min(d, std::abs(mr.field(i) + fine.field(i)));  // sign freedom
                acc += d;
                ++cnt;
            }
            er.err_u = cnt ? acc / cnt / std::max(fine.max_abs_u, 1e-300) : 0.0;
        }
        result.runs.push_back(er);
        result.table.rows.push_back({double(n_pan), double(16 * n_pan), er.cond, er.err_k,
                                     er.err_u});
    }
    result.finest = *runs[panlist.back()].nf;

    if (!config.grid_path.empty()) {
        // export the finest normalized eigenfunction on the full window
        const int n_pan = panlist.back();
        const MeshRun& mr = runs.at(n_pan);
        auto candidates = window_points(config.window);
        FieldGrid fgrid = make_field_grid(*curve, *mr.mesh, candidates);
        ModalSolution scaled;
        scaled.mode_n = config.mode_n;
        scaled.k = mr.k_star;
        scaled.rho = mr.nf->rho;
        scaled.mesh = mr.mesh;
        Eigen::VectorXcd u = eval_field(*curve, scaled, fgrid, config.N_ratio * n_pan);
        CsvTable grid;
        grid.header = {"rc", "z", "re_u", "im_u", "log10_error"};
        for (size_t i = 0; i < fgrid.points.size(); ++i) {
            if (!fgrid.points[i].inside) continue;
            grid.rows.push_back({fgrid.points[i].r.rc, fgrid.points[i].r.z, u(i).real(),
                                 u(i).imag(), 0.0});
        }
        result.grid = std::move(grid);
        write_csv(result.grid, config.grid_path);
    }
    if (!config.table_path.empty()) write_csv(result.table, config.table_path);
    return result;
}

}  // namespace axihelm
