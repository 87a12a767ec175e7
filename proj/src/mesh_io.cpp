#include <fstream>
#include <iomanip>
#include <sstream>

#include "polyhho/mesh.hpp"

namespace polyhho {

namespace {

// Token stream over the mesh text format that remembers line/column positions.
class Lexer {
public:
    explicit Lexer(const std::string& text) {
        std::istringstream in(text);
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.resize(hash);
            std::size_t pos = 0;
            while (pos < line.size()) {
                while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
                if (pos >= line.size()) break;
                const std::size_t start = pos;
                while (pos < line.size() && !std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
                tokens_.push_back({line.substr(start, pos - start), lineno, start + 1});
            }
        }
        last_line_ = lineno;
    }

    std::string word(const char* what) { return next(what).text; }

    double real(const char* what) {
        const Token& t = next(what);
        try {
            std::size_t used = 0;
            const double v = std::stod(t.text, &used);
            if (used != t.text.size()) throw std::invalid_argument("");
            return v;
        } catch (const std::exception&) {
            fail(t, std::string("expected a real number for ") + what);
        }
    }

    std::size_t index(const char* what) {
        const Token& t = next(what);
        if (t.text.empty() || t.text.find_first_not_of("0123456789") != std::string::npos)
            fail(t, std::string("expected a non-negative integer for ") + what);
        return std::stoull(t.text);
    }

    [[noreturn]] void fail_at_last(const std::string& msg) const {
        if (pos_ == 0) throw MeshError("line 1, column 1: " + msg);
        fail(tokens_[pos_ - 1], msg);
    }

    bool done() const { return pos_ >= tokens_.size(); }

private:
    struct Token {
        std::string text;
        std::size_t line;
        std::size_t column;
    };

    const Token& next(const char* what) {
        if (pos_ >= tokens_.size())
            throw MeshError("line " + std::to_string(last_line_) + ": unexpected end of file, expected " + what);
        return tokens_[pos_++];
    }

    [[noreturn]] static void fail(const Token& t, const std::string& msg) {
        throw MeshError("line " + std::to_string(t.line) + ", column " + std::to_string(t.column) + ": " + msg);
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    std::size_t last_line_ = 0;
};

}  // namespace

std::string write_mesh_string(const PolyMesh& mesh) {
    std::ostringstream out;
    out << "polymesh 1 2\n";
    out << "V " << mesh.num_vertices() << '\n' << std::setprecision(17);
    for (const auto& p : mesh.vertices()) out << p.x() << ' ' << p.y() << '\n';
    out << "C " << mesh.num_cells() << '\n';
    for (const auto& T : mesh.cells()) {
        out << T.vertices.size();
        for (auto v : T.vertices) out << ' ' << v;
        out << '\n';
    }
    return out.str();
}

PolyMesh read_mesh_string(const std::string& text) {
    Lexer lx(text);
    if (lx.word("header") != "polymesh") lx.fail_at_last("expected 'polymesh' header");
    if (lx.index("version") != 1) lx.fail_at_last("unsupported mesh format version");
    if (lx.index("dimension") != 2) lx.fail_at_last("only dimension 2 is supported");
    if (lx.word("vertex section") != "V") lx.fail_at_last("expected 'V'");
    const std::size_t nv = lx.index("vertex count");
    std::vector<Point> V;
    V.reserve(nv);
    for (std::size_t i = 0; i < nv; ++i) {
        const double x = lx.real("x coordinate");
        const double y = lx.real("y coordinate");
        V.emplace_back(x, y);
    }
    if (lx.word("cell section") != "C") lx.fail_at_last("expected 'C'");
    const std::size_t nc = lx.index("cell count");
    if (nc == 0) lx.fail_at_last("empty cell list");
    std::vector<std::vector<std::size_t>> loops(nc);
    for (std::size_t c = 0; c < nc; ++c) {
        const std::size_t m = lx.index("cell vertex count");
        if (m < 3) lx.fail_at_last("cell needs at least 3 vertices");
        for (std::size_t i = 0; i < m; ++i) {
            const std::size_t v = lx.index("vertex index");
            if (v >= nv)
                lx.fail_at_last("vertex index " + std::to_string(v) + " out of range (" + std::to_string(nv) + " vertices)");
            loops[c].push_back(v);
        }
    }
    if (!lx.done()) lx.fail_at_last("trailing data after cell section");
    return build_mesh(std::move(V), std::move(loops));
}

void save_mesh(const PolyMesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw MeshError("cannot open '" + path + "' for writing");
    out << write_mesh_string(mesh);
}

PolyMesh load_mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MeshError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return read_mesh_string(ss.str());
}

}  // namespace polyhho
