// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "liouville/contact_kernel.hpp"
#include "liouville/errors.hpp"
#include "liouville/exactlin.hpp"
#include "liouville/models.hpp"
#include "liouville/spectrum_search.hpp"
#include "liouville/torus_builder.hpp"
#include "spectrum_oracle.hpp"

using namespace liouville;
using namespace liouville::contact;

namespace {

struct Verdict {
    bool ok = true;
    std::ostringstream detail;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            detail << " [failed: " << what << "]";
        }
    }
};

int failures = 0;
int only = 0;  // run a single criterion when nonzero

void criterion(int id, const char* title, double budget_s, const std::function<void(Verdict&)>& body) {
    if (only && id != only) return;
    Verdict v;
    const auto start = std::chrono::steady_clock::now();
    try {
        body(v);
    } catch (const std::exception& e) {
        v.ok = false;
        v.detail << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (budget_s > 0 && secs >= budget_s) {
        v.ok = false;
        v.detail << " [over budget]";
    }
    if (!v.ok) ++failures;
    char budget[32] = "no budget";
    if (budget_s > 0) std::snprintf(budget, sizeof budget, "budget %.0fs", budget_s);
    std::printf("%s %d %s (%.2fs, %s)%s\n", v.ok ? "PASS" : "FAIL", id, title, secs, budget, v.detail.str().c_str());
    std::fflush(stdout);
}

const exactlin::IntMatrix kCat{{2, 1}, {1, 1}};

struct Emitted {
    spectrum::SpectrumRequest request;
    spectrum::SpectrumCertificate cert;
};

// The criterion-4 requests: n = 2, 3, 4 with eps 0.5 and 0.2, mu drawn
// uniformly from [-2, 2]^(n-2).
std::vector<Emitted> emit_certificates() {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> mu_dist(-2.0, 2.0);
    std::vector<Emitted> out;
    for (std::size_t n = 2; n <= 4; ++n)
        for (double eps : {0.5, 0.2}) {
            spectrum::SpectrumRequest req;
            req.n = n;
            req.eps = eps;
            for (std::size_t i = 0; i + 2 < n; ++i) req.mu.push_back(mu_dist(rng));
            req.seed = rng();
            out.push_back({req, spectrum::find_matrix(req)});
        }
    return out;
}

std::vector<Emitted> emitted;

double max_jacobian_error(const SmoothMap& f, const std::vector<Point>& pts, double h) {
    double worst = 0.0;
    for (const auto& p : pts) worst = std::max(worst, (fd_jacobian(f, p, h) - f.jacobian(p)).cwiseAbs().maxCoeff());
    return worst;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc > 1) only = std::atoi(argv[1]);
    criterion(1, "solenoid pullback factor 0.1 at 1e4 points to 1e-9", 1.0, [](Verdict& v) {
        const auto model = solenoid_model();
        const auto pts = sample_chart(model.chart, SamplingPlan{10000, 1});
        double worst = 0.0;
        for (const auto& p : pts) worst = std::max(worst, std::abs(conformal_factor(model, p, 1e-9).factor - 0.1));
        v.detail << " max|f-0.1|=" << worst << " points=" << pts.size();
        v.require(pts.size() >= 10000, "sample count");
        v.require(worst < 1e-9, "factor tolerance");
    });

    criterion(2, "transverse knot factor c*delta/(c-delta*y), certification, delta=c fails", 1.0, [](Verdict& v) {
        const double c = 0.1, delta = 0.001;
        const auto model = transverse_knot_model(c, delta);
        const auto pts = sample_chart(model.chart, SamplingPlan{10000, 2});
        double worst = 0.0;
        for (const auto& p : pts) {
            const double expect = c * delta / (c - delta * p[2]);
            worst = std::max(worst, std::abs(conformal_factor(model, p, 1e-9).factor - expect) / expect);
        }
        const auto cert = certify_contraction(model, 10000, 1e-8, 2);
        const auto bad = certify_contraction(transverse_knot_model(c, c), 10000, 1e-8, 2);
        v.detail << " max rel err=" << worst << " D1/D2/D3=" << cert.d1.pass << cert.d2.pass << cert.d3.pass
                 << " delta=c D1/D2/D3=" << bad.d1.pass << bad.d2.pass << bad.d3.pass;
        v.require(worst < 1e-9, "factor tolerance");
        v.require(cert.all_pass(), "certification");
        v.require(!bad.all_pass(), "delta = c must fail");
    });

    criterion(3, "cat map factor (3-sqrt5)/2 to 1e-8, eigenform relation to 1e-10", 1.0, [](Verdict& v) {
        const auto model = anosov_model(kCat);
        const double expect = (3.0 - std::sqrt(5.0)) / 2.0;
        double worst = 0.0;
        for (const auto& p : sample_chart(model.chart, SamplingPlan{10000, 3}))
            worst = std::max(worst, std::abs(conformal_factor(model, p, 1e-8).factor - expect));
        const auto forms = anosov_eigenforms(kCat);
        // Independent check of A^T beta_i = lambda_i beta_i in plain doubles.
        double relation = 0.0;
        for (long i = 0; i < 2; ++i) {
            const double b0 = forms.betas(0, i), b1 = forms.betas(1, i);
            const double l = forms.eigenvalues[static_cast<std::size_t>(i)];
            relation = std::max({relation, std::abs(2 * b0 + 1 * b1 - l * b0), std::abs(1 * b0 + 1 * b1 - l * b1)});
        }
        v.detail << " max|f-lambda_n|=" << worst << " relation=" << relation;
        v.require(worst < 1e-8, "factor tolerance");
        v.require(relation < 1e-10, "eigenform relation");
    });

    criterion(4, "find-matrix n=2,3,4 x eps {0.5,0.2}, exact checks, n=3 exhaustive cross-check", 60.0, [](Verdict& v) {
        emitted = emit_certificates();
        for (const auto& [req, cert] : emitted) {
            const std::size_t n = req.n;
            const double eps = req.eps;
            const auto [c1, c2] = spectrum::check_conditions(cert, req.mu, eps);
            std::ostringstream tag;
            tag << "n=" << n << " eps=" << eps;
            v.require(exactlin::determinant(cert.a) == 1, tag.str() + " det");
            v.require(cert.sturm_count == n && cert.square_free, tag.str() + " simple real roots");
            v.require(exactlin::sturm_isolate(exactlin::char_poly(cert.a), true).count_real == n,
                      tag.str() + " independent Sturm count");
            v.require(c1 && c2, tag.str() + " conditions");
            v.detail << " " << tag.str() << ":k1=" << cert.k[0].get_str();
            if (n == 3) {
                std::set<std::pair<long, long>> borderline;
                const auto hits = oracle::exhaustive_n3(req.mu[0], eps, 200, &borderline);
                const bool in_range = abs(cert.companion_k[0]) <= 200 && abs(cert.companion_k[1]) <= 200;
                const std::pair<long, long> key{cert.companion_k[0].get_si(), cert.companion_k[1].get_si()};
                v.detail << " oracle_hits=" << hits.size();
                v.require(!hits.empty(), tag.str() + " oracle nonempty");
                if (in_range) {
                    v.require(hits.count(key) == 1 || borderline.count(key) == 1, tag.str() + " oracle agrees");
                } else {
                    v.require(oracle::satisfies(oracle::real_eigenvalues(cert.a), req.mu[0], eps) >= 0,
                              tag.str() + " oracle agrees");
                }
            }
        }
    });

    criterion(5, "descent residual < 1e-9 on built-in models, wrong G > 1e-2", 1.0, [](Verdict& v) {
        const std::vector<ContactModel> bases{jet_space_model(), solenoid_model(), anosov_model(kCat)};
        for (const auto& base : bases) {
            const auto model = torus::extend_G(base, torus::GMode::Auto);
            const auto rep = torus::descent_check(model, 1000, 1e-9, 0, false);
            v.detail << " " << base.name << "=" << rep.max_residual;
            v.require(rep.max_residual < 1e-9, base.name);
        }
        const auto wrong = torus::with_constant_G(solenoid_model(), std::log(9.0));
        const auto rep = torus::descent_check(wrong, 1000, 1e-9, 0, false);
        v.detail << " wrong_G=" << rep.max_residual;
        v.require(rep.max_residual > 1e-2, "wrong G detected");
    });

    criterion(6, "solenoid skeleton estimate in [2.2, 2.35]; square 2.0+-0.1; Cantor dust 0.631+-0.05", 120.0,
              [](Verdict& v) {
                  const auto est = torus::skeleton_dimension(solenoid_model(), 8, 1000000);
                  std::mt19937_64 rng(6);
                  std::uniform_real_distribution<double> u(0.0, 1.0);
                  std::vector<Point> square(1000000, Point(2));
                  for (auto& p : square) p << u(rng), u(rng);
                  const auto sq = torus::box_counting_dimension(square, torus::default_cloud_scales());
                  std::vector<Point> dust(1000000, Point(1));
                  for (auto& p : dust) {
                      double x = 0.0, w = 1.0;
                      for (int d = 0; d < 30; ++d) {
                          w /= 3.0;
                          if (rng() & 1) x += 2.0 * w;
                      }
                      p << x;
                  }
                  std::vector<double> thirds;
                  for (int k = 1; k <= 8; ++k) thirds.push_back(std::pow(3.0, -k));
                  const auto cd = torus::box_counting_dimension(dust, thirds);
                  v.detail << " skeleton=" << est.estimate << " square=" << sq.slope << " dust=" << cd.slope;
                  v.require(est.estimate >= 2.2 && est.estimate <= 2.35, "skeleton range");
                  v.require(std::abs(sq.slope - 2.0) <= 0.1, "square calibration");
                  v.require(std::abs(cd.slope - std::log(2.0) / std::log(3.0)) <= 0.05, "dust calibration");
              });

    criterion(7, "depth-m solenoid section at theta0=0 has 2^m clusters, m=0..6", 30.0, [](Verdict& v) {
        const auto model = solenoid_model();
        v.detail << " clusters=";
        for (int m = 0; m <= 6; ++m) {
            // Deeper sections have narrower bands, so they need more seeds.
            const std::size_t seeds = m < 6 ? 300000 : 1000000;
            const auto sample = torus::iterate_attractor(model, m, seeds);
            const auto section = torus::cross_section(sample, model, 0.0, 0.15);
            const std::size_t count = torus::count_clusters(section, 0.3 * std::pow(0.05, m - 1));
            v.detail << (m ? "," : "") << count;
            v.require(count == (std::size_t{1} << m), "m=" + std::to_string(m));
        }
    });

    criterion(8, "second-order finite-difference convergence; Vieta on emitted certificates", 0.0, [](Verdict& v) {
        std::vector<ContactModel> models{jet_space_model(), solenoid_model(), transverse_knot_model(),
                                         anosov_model(kCat)};
        std::size_t skipped = 0;
        if (emitted.empty()) emitted = emit_certificates();
        for (const auto& [req, cert] : emitted) {
            // Only certificates whose smallest root is positive define an Anosov model.
            try {
                models.push_back(anosov_model(cert));
            } catch (const EigenFailure&) {
                ++skipped;
            }
        }
        v.detail << " anosov_from_certs=" << emitted.size() - skipped;
        for (const auto& model : models) {
            std::vector<Point> pts;
            for (const auto& p : sample_chart(model.chart, SamplingPlan{200, 8}))
                if (model.chart.signed_margin(p) > 0.05) pts.push_back(p);
            const double coarse = max_jacobian_error(model.map(), pts, 1e-3);
            const double fine = max_jacobian_error(model.map(), pts, 5e-4);
            if (coarse < 1e-10) {
                // Affine in the chart: differences are exact up to rounding.
                v.require(fine < 1e-10, model.name + " exact");
                continue;
            }
            const double ratio = coarse / fine;
            v.detail << " " << model.name << " ratio=" << ratio;
            v.require(ratio > 3.8 && ratio < 4.2, model.name + " order 2");
        }
        std::size_t vieta = 0;
        for (const auto& e : emitted) vieta += spectrum::vieta_consistent(e.cert) ? 1 : 0;
        v.detail << " vieta=" << vieta << "/" << emitted.size();
        v.require(!emitted.empty() && vieta == emitted.size(), "Vieta round trip");
    });

    return failures;
}
