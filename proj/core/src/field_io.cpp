#include "egm/field_io.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace egm {

void dump_field_csv(const std::string& path, const BiquatField& field) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw Error("cannot open " + path + " for writing");
    std::fputs("tau,x,y,z,re_f,im_f,re_F1,im_F1,re_F2,im_F2,re_F3,im_F3\n", f);
    const Grid4& g = field.grid();
    for (int it = 0; it < g.nt; ++it)
        for (int ix = 0; ix < g.nx; ++ix)
            for (int iy = 0; iy < g.ny; ++iy)
                for (int iz = 0; iz < g.nz; ++iz) {
                    const Biquaternion& b = field.at(it, ix, iy, iz);
                    std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                                 g.tau(it), g.x(ix), g.y(iy), g.z(iz), b.s.real(), b.s.imag(),
                                 b.v.x.real(), b.v.x.imag(), b.v.y.real(), b.v.y.imag(),
                                 b.v.z.real(), b.v.z.imag());
                }
    std::fclose(f);
}

namespace {

std::vector<double> sorted_unique(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::vector<double> out;
    for (double d : v)
        if (out.empty() || d > out.back() + 1e-12 * (1.0 + std::abs(d))) out.push_back(d);
    return out;
}

double uniform_spacing(const std::vector<double>& axis, const char* name) {
    if (axis.size() < 2) return 1.0;
    const double d0 = axis[1] - axis[0];
    for (std::size_t i = 1; i + 1 < axis.size(); ++i) {
        const double d = axis[i + 1] - axis[i];
        if (std::abs(d - d0) > 1e-9 * (1.0 + std::abs(d0)))
            throw ConfigError(std::string("CSV grid is not uniform along ") + name);
    }
    return d0;
}

} // namespace

BiquatField load_field_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw ConfigError(path + ": empty file");

    struct Row {
        double c[4];
        Biquaternion b;
    };
    std::vector<Row> rows;
    std::vector<double> taus, xs, ys, zs;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        Row r;
        double vals[12];
        std::stringstream ss(line);
        std::string cell;
        int k = 0;
        while (std::getline(ss, cell, ',') && k < 12) {
            try {
                vals[k] = std::stod(cell);
            } catch (const std::exception&) {
                throw ConfigError(path + ":" + std::to_string(lineno) + ": bad number '" + cell + "'");
            }
            ++k;
        }
        if (k != 12)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected 12 columns");
        for (int c = 0; c < 4; ++c) r.c[c] = vals[c];
        r.b = Biquaternion{Complex(vals[4], vals[5]),
                           {Complex(vals[6], vals[7]), Complex(vals[8], vals[9]),
                            Complex(vals[10], vals[11])}};
        if (!finite(r.b))
            throw NonFiniteValue(path + ":" + std::to_string(lineno) + ": non-finite sample");
        taus.push_back(r.c[0]);
        xs.push_back(r.c[1]);
        ys.push_back(r.c[2]);
        zs.push_back(r.c[3]);
        rows.push_back(r);
    }
    if (rows.empty()) throw ConfigError(path + ": no data rows");

    const std::vector<double> ta = sorted_unique(taus), xa = sorted_unique(xs),
                              ya = sorted_unique(ys), za = sorted_unique(zs);
    if (ta.size() * xa.size() * ya.size() * za.size() != rows.size())
        throw ConfigError(path + ": rows do not fill a complete grid");

    const Grid4 g(int(ta.size()), int(xa.size()), int(ya.size()), int(za.size()),
                  ta.size() > 1 ? uniform_spacing(ta, "tau") : 1.0,
                  xa.size() > 1 ? uniform_spacing(xa, "x") : 1.0, ta[0], xa[0], ya[0], za[0]);
    // y/z spacings must match x's
    if (ya.size() > 1 && std::abs(uniform_spacing(ya, "y") - g.h) > 1e-9 * (1.0 + g.h))
        throw ConfigError(path + ": y spacing differs from x spacing");
    if (za.size() > 1 && std::abs(uniform_spacing(za, "z") - g.h) > 1e-9 * (1.0 + g.h))
        throw ConfigError(path + ": z spacing differs from x spacing");

    auto locate = [](const std::vector<double>& axis, double v) {
        const auto it = std::lower_bound(axis.begin(), axis.end(), v - 1e-9);
        return int(it - axis.begin());
    };
    BiquatField out(g);
    for (const Row& r : rows)
        out.at(locate(ta, r.c[0]), locate(xa, r.c[1]), locate(ya, r.c[2]), locate(za, r.c[3])) =
            r.b;
    return out;
}

} // namespace egm
