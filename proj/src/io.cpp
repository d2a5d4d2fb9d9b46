#include "lpcvt/io.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace lpcvt {

namespace {

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    return in;
}

[[noreturn]] void parse_fail(const std::string& path, int line, const std::string& what) {
    throw ParseError(path + ":" + std::to_string(line) + ": " + what);
}

bool is_blank_or_comment(const std::string& s) {
    for (char c : s) {
        if (c == '#') return true;
        if (!std::isspace(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

}  // namespace

Domain load_domain(const std::string& path, Domain::Kind mode) {
    if (mode == Domain::Kind::Volume) {
        auto in = open_input(path);
        std::vector<HalfSpace> hs;
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (is_blank_or_comment(line)) continue;
            std::istringstream ss(line);
            HalfSpace h;
            if (!(ss >> h.normal[0] >> h.normal[1] >> h.normal[2] >> h.offset)) {
                parse_fail(path, lineno, "expected `nx ny nz d`");
            }
            hs.push_back(h);
        }
        if (hs.empty()) parse_fail(path, lineno, "no half-spaces found");
        return Domain::volume(std::move(hs));
    }

    const auto dot = path.rfind('.');
    const std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
    if (ext == "obj" || ext == "OBJ") return Domain::surface(load_obj(path));
    if (ext == "off" || ext == "OFF") return Domain::surface(load_off(path));
    throw ParseError(path + ": unknown mesh extension (expected .obj or .off)");
}

SurfaceMesh load_obj(const std::string& path) {
    auto in = open_input(path);
    SurfaceMesh mesh;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (is_blank_or_comment(line)) continue;
        std::istringstream ss(line);
        std::string kw;
        ss >> kw;
        if (kw == "v") {
            Vec3 v;
            if (!(ss >> v[0] >> v[1] >> v[2])) parse_fail(path, lineno, "bad vertex line");
            mesh.vertices.push_back(v);
        } else if (kw == "f") {
            std::vector<int> idx;
            std::string tok;
            while (ss >> tok) {
                // `f v`, `f v/t`, `f v/t/n`, `f v//n` all start with the
                // vertex index.
                const auto slash = tok.find('/');
                const std::string head = slash == std::string::npos ? tok : tok.substr(0, slash);
                int v = 0;
                try {
                    v = std::stoi(head);
                } catch (...) {
                    parse_fail(path, lineno, "bad face index `" + tok + "`");
                }
                if (v < 0) v = static_cast<int>(mesh.vertices.size()) + v + 1;
                idx.push_back(v - 1);
            }
            if (idx.size() != 3) {
                throw NonTriangleFace(path + ":" + std::to_string(lineno) + ": face with " +
                                      std::to_string(idx.size()) + " vertices (triangles only)");
            }
            mesh.triangles.push_back({idx[0], idx[1], idx[2]});
        }
        // all other keywords (vn, vt, usemtl, ...) are ignored
    }
    return mesh;
}

SurfaceMesh load_off(const std::string& path) {
    auto in = open_input(path);
    std::string line;
    int lineno = 0;

    auto next_content = [&]() -> std::string {
        while (std::getline(in, line)) {
            ++lineno;
            if (!is_blank_or_comment(line)) return line;
        }
        parse_fail(path, lineno, "unexpected end of file");
    };

    std::string header = next_content();
    if (header.rfind("OFF", 0) != 0) parse_fail(path, lineno, "missing OFF header");

    // Counts may share the header line ("OFF 8 6 12") or follow it.
    std::istringstream hs(header.substr(3));
    long nv = 0, nf = 0, ne = 0;
    if (!(hs >> nv >> nf >> ne)) {
        std::istringstream cs(next_content());
        if (!(cs >> nv >> nf >> ne)) parse_fail(path, lineno, "expected vertex/face/edge counts");
    }

    SurfaceMesh mesh;
    mesh.vertices.reserve(nv);
    for (long i = 0; i < nv; ++i) {
        std::istringstream vs(next_content());
        Vec3 v;
        if (!(vs >> v[0] >> v[1] >> v[2])) parse_fail(path, lineno, "bad vertex line");
        mesh.vertices.push_back(v);
    }
    for (long i = 0; i < nf; ++i) {
        std::istringstream fs(next_content());
        int n = 0;
        if (!(fs >> n)) parse_fail(path, lineno, "bad face line");
        if (n != 3) {
            throw NonTriangleFace(path + ":" + std::to_string(lineno) + ": face with " +
                                  std::to_string(n) + " vertices (triangles only)");
        }
        std::array<int, 3> idx;
        if (!(fs >> idx[0] >> idx[1] >> idx[2])) parse_fail(path, lineno, "bad face indices");
        mesh.triangles.push_back(idx);
    }
    return mesh;
}

TensorField load_tensor_field(const std::string& path) {
    auto in = open_input(path);
    std::vector<std::pair<Vec3, AnisotropyTensor>> samples;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (is_blank_or_comment(line)) continue;
        std::istringstream ss(line);
        Vec3 x;
        AnisotropyTensor g;
        if (!(ss >> x[0] >> x[1] >> x[2] >> g.g11 >> g.g12 >> g.g13 >> g.g22 >> g.g23 >> g.g33)) {
            parse_fail(path, lineno, "expected `x y z g11 g12 g13 g22 g23 g33`");
        }
        samples.emplace_back(x, g);
    }
    if (samples.empty()) throw EmptyField(path + ": no tensor samples");
    if (samples.size() == 1) return TensorField::constant(samples[0].second);
    return TensorField::nearest(std::move(samples));
}

SeedSet load_seeds(const std::string& path) {
    auto in = open_input(path);
    std::vector<Vec3> pts;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (is_blank_or_comment(line)) continue;
        std::istringstream ss(line);
        Vec3 x;
        if (!(ss >> x[0] >> x[1] >> x[2])) parse_fail(path, lineno, "expected `x y z`");
        pts.push_back(x);
    }
    if (pts.empty()) parse_fail(path, lineno, "no seeds found");
    return SeedSet::from_points(std::move(pts));
}

void write_seeds(const std::string& path, const SeedSet& seeds) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw IoError("cannot write " + path);
    for (const auto& p : seeds.points) {
        std::fprintf(f, "%.17g %.17g %.17g\n", p[0], p[1], p[2]);
    }
    std::fclose(f);
}

void write_trace_csv(const std::string& path, const std::vector<TraceRow>& trace) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw IoError("cannot write " + path);
    std::fprintf(f, "iter,F,grad_inf_norm,step_size\n");
    for (const auto& r : trace) {
        std::fprintf(f, "%d,%.17g,%.17g,%.17g\n", r.iter, r.energy, r.grad_inf, r.step);
    }
    std::fclose(f);
}

void write_rvd_obj(const std::string& path, const std::vector<CellPolygons>& cells) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw IoError("cannot write " + path);
    int base = 1;
    for (const auto& cell : cells) {
        std::fprintf(f, "# cell %d\n", cell.seed_index);
        for (const auto& ring : cell.rings) {
            for (const auto& p : ring) {
                std::fprintf(f, "v %.17g %.17g %.17g\n", p[0], p[1], p[2]);
            }
            std::fprintf(f, "f");
            for (std::size_t t = 0; t < ring.size(); ++t) {
                std::fprintf(f, " %d", base + static_cast<int>(t));
            }
            std::fprintf(f, "\n");
            base += static_cast<int>(ring.size());
        }
    }
    std::fclose(f);
}

}  // namespace lpcvt
