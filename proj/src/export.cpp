#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nilmax/error.hpp"
#include "nilmax/pipeline.hpp"

namespace nilmax {

namespace {

std::string num(double x) {
    if (x == 0.0) x = 0.0;  // drop negative zero
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

struct Rgb {
    int r, g, b;
};

// Upper hemisphere of N warm, lower cool.
Rgb hemisphere_color(const Vec3& n) { return n[2] >= 0.0 ? Rgb{217, 95, 2} : Rgb{27, 120, 200}; }

}  // namespace

std::string format_z(cplx z) {
    if (z == cplx(0.0)) return "0";
    if (z.imag() == 0.0) return num(z.real());
    std::string im = num(std::abs(z.imag())) + "i";
    if (z.real() == 0.0) return (z.imag() < 0 ? "-" : "") + im;
    return num(z.real()) + (z.imag() < 0 ? "-" : "+") + im;
}

std::string mesh_text(const SurfaceRaster& r, const MeshOptions& opt) {
    const DomainGrid& G = r.grid;
    std::ostringstream os;
    const size_t nv = r.points.size();
    const size_t nf = 2 * static_cast<size_t>(G.nx - 1) * static_cast<size_t>(G.ny - 1);
    if (opt.ply) {
        os << "ply\nformat ascii 1.0\n";
        os << "element vertex " << nv << "\n";
        os << "property double x\nproperty double y\nproperty double z\n";
        os << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
        os << "element face " << nf << "\nproperty list uchar int vertex_indices\nend_header\n";
    } else {
        os << "# nilmax surface mesh, " << G.nx << " x " << G.ny << " grid\n";
    }
    for (const auto& p : r.points) {
        const Vec3 x = opt.cmc ? p.s.f_cmc : p.s.f_nil.vec();
        const Rgb c = hemisphere_color(p.s.N);
        if (opt.ply) {
            os << num(x[0]) << ' ' << num(x[1]) << ' ' << num(x[2]) << ' ' << c.r << ' ' << c.g << ' ' << c.b << '\n';
        } else {
            os << "v " << num(x[0]) << ' ' << num(x[1]) << ' ' << num(x[2]) << ' ' << num(c.r / 255.0) << ' '
               << num(c.g / 255.0) << ' ' << num(c.b / 255.0) << '\n';
        }
    }
    for (int k = 0; k + 1 < G.ny; ++k) {
        for (int j = 0; j + 1 < G.nx; ++j) {
            const size_t a = G.index(j, k), b = G.index(j + 1, k), c = G.index(j + 1, k + 1), d = G.index(j, k + 1);
            if (opt.ply) {
                os << "3 " << a << ' ' << b << ' ' << c << '\n' << "3 " << a << ' ' << c << ' ' << d << '\n';
            } else {
                os << "f " << a + 1 << ' ' << b + 1 << ' ' << c + 1 << '\n'
                   << "f " << a + 1 << ' ' << c + 1 << ' ' << d + 1 << '\n';
            }
        }
    }
    return os.str();
}

std::string singular_csv(const std::vector<SingularCurve>& curves, const std::vector<SingularPoint>& extra) {
    std::ostringstream os;
    os << "re_z,im_z,kind,re_bhat,im_bhat,im_bhat_prime,margin,curve,index,decided,tentative_kind,raw_kind,"
          "tangent_elevation\n";
    auto row = [&](const SingularPoint& p, const std::string& curve, size_t index) {
        os << num(p.z.real()) << ',' << num(p.z.imag()) << ',' << point_label(p)
           << ',' << num(p.diagnostics.re_bhat) << ',' << num(p.diagnostics.im_bhat) << ','
           << num(p.diagnostics.im_bhat_prime) << ',' << num(p.margin) << ',' << curve << ',' << index << ','
           << (p.decided ? 1 : 0) << ',' << kind_name(p.kind) << ','
           << (p.raw_decision.decided ? kind_name(p.raw_decision.kind) : "TooCloseToCall") << ','
           << num(tangent_elevation(p.tangent)) << '\n';
    };
    for (size_t c = 0; c < curves.size(); ++c)
        for (size_t i = 0; i < curves[c].points.size(); ++i) row(curves[c].points[i], std::to_string(c), i);
    for (size_t i = 0; i < extra.size(); ++i) row(extra[i], "point", i);
    return os.str();
}

void write_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw Error(ErrorCode::IoError, "cannot open " + tmp + " for writing");
        f << content;
        f.flush();
        if (!f) throw Error(ErrorCode::IoError, "write failed for " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot rename " + tmp + " to " + path + ": " + ec.message());
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorCode::IoError, "cannot read " + path);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

}  // namespace nilmax
