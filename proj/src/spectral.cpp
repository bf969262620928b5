#include "stormdiag/spectral.hpp"

#include <cmath>
#include <memory>
#include <mutex>

#include <fftw3.h>

#include "stormdiag/constants.hpp"
#include "stormdiag/error.hpp"

namespace stormdiag::spectral {

namespace {

using cplx = std::complex<double>;

// fftw_plan_* is not thread-safe; execution is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwFree {
    void operator()(void* p) const { fftw_free(p); }
};
struct PlanDestroy {
    void operator()(fftw_plan p) const {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(p);
    }
};
using RealBuffer = std::unique_ptr<double[], FftwFree>;
using ComplexBuffer = std::unique_ptr<fftw_complex[], FftwFree>;
using Plan = std::unique_ptr<std::remove_pointer_t<fftw_plan>, PlanDestroy>;

RealBuffer alloc_real(std::size_t n) { return RealBuffer(fftw_alloc_real(n)); }
ComplexBuffer alloc_complex(std::size_t n) { return ComplexBuffer(fftw_alloc_complex(n)); }

// Recurrence coefficients for the orthonormal associated Legendre functions.
class LegendreTable {
public:
    explicit LegendreTable(int lmax) : lmax_(lmax), a_(SpectralField::count(lmax)), b_(a_.size()) {
        SpectralField layout(lmax);
        for (int m = 0; m <= lmax; ++m) {
            for (int l = m + 2; l <= lmax; ++l) {
                const double l2 = double(l) * l;
                const double m2 = double(m) * m;
                const double lm1 = l - 1.0;
                a_[layout.index(l, m)] = std::sqrt((4.0 * l2 - 1.0) / (l2 - m2));
                b_[layout.index(l, m)] = std::sqrt((lm1 * lm1 - m2) / (4.0 * lm1 * lm1 - 1.0));
            }
        }
    }

    // Pbar(l, m)(x) for all (l, m), m-major, with s = sqrt(1 - x^2) >= 0.
    void evaluate(double x, double s, std::vector<double>& out) const {
        out.assign(a_.size(), 0.0);
        SpectralField layout(lmax_);
        double pmm = 1.0 / std::sqrt(4.0 * kPi);
        for (int m = 0; m <= lmax_; ++m) {
            if (m > 0) pmm *= std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s;
            const std::size_t base = layout.index(m, m);
            out[base] = pmm;
            if (m == lmax_) break;
            double p_prev = pmm;
            double p_cur = std::sqrt(2.0 * m + 3.0) * x * pmm;
            out[base + 1] = p_cur;
            for (int l = m + 2; l <= lmax_; ++l) {
                const std::size_t k = base + (l - m);
                const double p_next = a_[k] * (x * p_cur - b_[k] * p_prev);
                out[k] = p_next;
                p_prev = p_cur;
                p_cur = p_next;
            }
        }
    }

private:
    int lmax_;
    std::vector<double> a_;
    std::vector<double> b_;
};

double colatitude(const GridSpec& g, int i) { return (90.0 - g.lat(i)) * kDegToRad; }

// integral_0^pi cos(k theta) sin(theta) dtheta
double cos_moment(int k) {
    if (k == 1) return 0.0;
    return (k % 2 == 0) ? 2.0 / (1.0 - double(k) * k) : 0.0;
}

void require_global(const GridSpec& g, const char* what) {
    if (!g.is_global()) {
        throw Error(std::string(what) + ": grid must be global (periodic, pole to pole)");
    }
}

}  // namespace

SpectralField::SpectralField(int lmax_in) : lmax(lmax_in), coeffs(count(lmax_in)) {
    if (lmax_in < 0) throw Error("lmax must be non-negative");
}

double SpectralField::energy() const {
    double e = 0.0;
    for (int m = 0; m <= lmax; ++m) {
        const double weight = m == 0 ? 1.0 : 2.0;
        for (int l = m; l <= lmax; ++l) e += weight * std::norm((*this)(l, m));
    }
    return e;
}

std::vector<double> quadrature_weights(const GridSpec& g) {
    require_global(g, "quadrature_weights");
    const int n = g.nlat;
    std::vector<double> w(n, 0.0);
    if (g.includes_poles) {
        // Clenshaw-Curtis on theta_j = j pi / N
        const int big_n = n - 1;
        for (int j = 0; j < n; ++j) {
            double sum = 0.0;
            for (int k = 0; k <= big_n; ++k) {
                const double half = (k == 0 || k == big_n) ? 0.5 : 1.0;
                sum += half * cos_moment(k) * std::cos(k * j * kPi / big_n);
            }
            const double end = (j == 0 || j == big_n) ? 0.5 : 1.0;
            w[j] = end * 2.0 / big_n * sum;
        }
    } else {
        // Fejer's first rule on theta_j = (j + 1/2) pi / N
        for (int j = 0; j < n; ++j) {
            const double theta = (j + 0.5) * kPi / n;
            double sum = 0.0;
            for (int k = 0; k < n; ++k) {
                const double half = k == 0 ? 0.5 : 1.0;
                sum += half * cos_moment(k) * std::cos(k * theta);
            }
            w[j] = 2.0 / n * sum;
        }
    }
    return w;
}

SpectralField analyze(const Field& f, int lmax) {
    const GridSpec& g = f.grid;
    require_global(g, "analyze");
    if (lmax < 0) throw Error("analyze: lmax must be non-negative");
    if (g.nlat < 2 * (lmax + 1)) {
        throw Error("analyze: nlat = " + std::to_string(g.nlat) + " insufficient for lmax = " +
                    std::to_string(lmax));
    }
    if (g.nlon <= 2 * lmax) throw Error("analyze: nlon insufficient for lmax");
    for (double v : f.values) {
        if (std::isnan(v)) throw Error("analyze: field " + f.key().describe() + " contains NaN");
    }

    const int nlat = g.nlat;
    const int nlon = g.nlon;
    const int nfreq = nlon / 2 + 1;

    auto in = alloc_real(static_cast<std::size_t>(nlat) * nlon);
    auto spec = alloc_complex(static_cast<std::size_t>(nlat) * nfreq);
    Plan plan;
    {
        std::lock_guard lock(planner_mutex());
        plan.reset(fftw_plan_many_dft_r2c(1, &nlon, nlat, in.get(), nullptr, 1, nlon, spec.get(),
                                          nullptr, 1, nfreq, FFTW_ESTIMATE));
    }
    std::copy(f.values.begin(), f.values.end(), in.get());
    fftw_execute(plan.get());

    const std::vector<double> weights = quadrature_weights(g);
    const double dlam = 2.0 * kPi / nlon;
    const double lon0 = g.lon_start * kDegToRad;

    std::vector<cplx> phase(lmax + 1);
    for (int m = 0; m <= lmax; ++m) phase[m] = std::polar(dlam, -m * lon0);

    SpectralField out(lmax);
    LegendreTable table(lmax);
    std::vector<double> pbar;
    std::vector<cplx> gm(lmax + 1);
    for (int i = 0; i < nlat; ++i) {
        if (weights[i] == 0.0) continue;
        const double theta = colatitude(g, i);
        table.evaluate(std::cos(theta), std::sin(theta), pbar);
        const fftw_complex* row = spec.get() + static_cast<std::size_t>(i) * nfreq;
        for (int m = 0; m <= lmax; ++m) gm[m] = weights[i] * phase[m] * cplx(row[m][0], row[m][1]);
        for (int m = 0; m <= lmax; ++m) {
            const std::size_t base = out.index(m, m);
            for (int l = m; l <= lmax; ++l) {
                out.coeffs[base + (l - m)] += pbar[base + (l - m)] * gm[m];
            }
        }
    }
    return out;
}

Field synthesize(const SpectralField& s, const GridSpec& target) {
    target.validate();
    require_global(target, "synthesize");
    const int lmax = s.lmax;
    if (target.nlon <= 2 * lmax) throw Error("synthesize: nlon insufficient for lmax");

    const int nlat = target.nlat;
    const int nlon = target.nlon;
    const int nfreq = nlon / 2 + 1;

    auto spec = alloc_complex(static_cast<std::size_t>(nlat) * nfreq);
    auto out_buf = alloc_real(static_cast<std::size_t>(nlat) * nlon);
    Plan plan;
    {
        std::lock_guard lock(planner_mutex());
        plan.reset(fftw_plan_many_dft_c2r(1, &nlon, nlat, spec.get(), nullptr, 1, nfreq,
                                          out_buf.get(), nullptr, 1, nlon, FFTW_ESTIMATE));
    }

    const double lon0 = target.lon_start * kDegToRad;
    LegendreTable table(lmax);
    std::vector<double> pbar;
    for (int i = 0; i < nlat; ++i) {
        const double theta = colatitude(target, i);
        table.evaluate(std::cos(theta), std::sin(theta), pbar);
        fftw_complex* row = spec.get() + static_cast<std::size_t>(i) * nfreq;
        for (int m = 0; m < nfreq; ++m) row[m][0] = row[m][1] = 0.0;
        for (int m = 0; m <= lmax; ++m) {
            const std::size_t base = s.index(m, m);
            cplx acc = 0.0;
            for (int l = m; l <= lmax; ++l) acc += pbar[base + (l - m)] * s.coeffs[base + (l - m)];
            acc *= std::polar(1.0, m * lon0);
            row[m][0] = acc.real();
            row[m][1] = m == 0 ? 0.0 : acc.imag();
        }
    }
    fftw_execute(plan.get());

    Field f;
    f.grid = target;
    f.values.assign(out_buf.get(), out_buf.get() + target.size());
    return f;
}

Field truncate(const Field& f, int lmax) {
    Field out = synthesize(analyze(f, lmax), f.grid);
    out.variable = f.variable;
    out.level = f.level;
    out.valid_time = f.valid_time;
    out.units = f.units;
    return out;
}

double grid_energy(const Field& f) {
    const std::vector<double> w = quadrature_weights(f.grid);
    const double dlam = 2.0 * kPi / f.grid.nlon;
    double total = 0.0;
    for (int i = 0; i < f.grid.nlat; ++i) {
        double row = 0.0;
        for (double v : f.row(i)) row += v * v;
        total += w[i] * dlam * row;
    }
    return total;
}

double area_mean(const Field& f) {
    const std::vector<double> w = quadrature_weights(f.grid);
    double total = 0.0;
    for (int i = 0; i < f.grid.nlat; ++i) {
        double row = 0.0;
        for (double v : f.row(i)) row += v;
        total += w[i] * row / f.grid.nlon;
    }
    // weights integrate to 2 over colatitude
    return total / 2.0;
}

void write_coefficient_csv(std::ostream& out, const SpectralField& s) {
    out << "l,m,abs\n";
    for (int l = 0; l <= s.lmax; ++l) {
        for (int m = 0; m <= l; ++m) out << l << ',' << m << ',' << std::abs(s(l, m)) << '\n';
    }
}

Field fill_pole_rows(const Field& f) {
    const GridSpec& g = f.grid;
    Field out = f;
    for (int i = 0; i < g.nlat; ++i) {
        const bool pole = g.is_pole_row(i);
        for (int j = 0; j < g.nlon; ++j) {
            if (!std::isnan(f(i, j))) continue;
            if (!pole) {
                throw Error("field " + f.key().describe() + " has missing values away from the poles");
            }
            const int step = i == 0 ? 1 : -1;
            int k = i + step;
            while (k >= 0 && k < g.nlat && std::isnan(f(k, j))) k += step;
            if (k < 0 || k >= g.nlat) throw Error("field " + f.key().describe() + " column is all missing");
            out(i, j) = f(k, j);
        }
    }
    return out;
}

}  // namespace stormdiag::spectral
