#include "attnpca/raster.hpp"

#include <cctype>
#include <fstream>
#include <string>

#include "attnpca/error.hpp"

namespace attnpca {

Raster::Raster(ImageGeometry g, std::vector<std::uint8_t> px) : geometry(g), pixels(std::move(px)) {
    if (g.rows < 1 || g.cols < 1) throw DataError("raster dimensions must be positive");
    if (pixels.size() != g.size()) throw DataError("raster pixel count does not match geometry");
}

Raster::Raster(int rows, int cols, std::uint8_t fill)
    : Raster(ImageGeometry{rows, cols}, std::vector<std::uint8_t>(
                                            rows > 0 && cols > 0 ? static_cast<std::size_t>(rows) * cols : 0, fill)) {}

namespace {

// Next whitespace-delimited header token, skipping '#' comments.
std::string next_token(std::istream& in) {
    std::string token;
    int ch;
    while ((ch = in.get()) != EOF) {
        if (ch == '#') {
            while ((ch = in.get()) != EOF && ch != '\n') {
            }
            continue;
        }
        if (std::isspace(ch)) {
            if (!token.empty()) break;
            continue;
        }
        token.push_back(static_cast<char>(ch));
    }
    return token;
}

int parse_positive(const std::string& token, const std::filesystem::path& path) {
    try {
        std::size_t used = 0;
        const int v = std::stoi(token, &used);
        if (used != token.size() || v < 0) throw DataError("");
        return v;
    } catch (const std::exception&) {
        throw DataError("malformed graymap header in " + path.string());
    }
}

} // namespace

Raster read_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open image " + path.string());

    const std::string magic = next_token(in);
    if (magic != "P5" && magic != "P2") throw DataError("unsupported raster format in " + path.string());
    const int cols = parse_positive(next_token(in), path);
    const int rows = parse_positive(next_token(in), path);
    const int maxval = parse_positive(next_token(in), path);
    if (rows < 1 || cols < 1) throw DataError("empty raster in " + path.string());
    if (maxval < 1 || maxval > 255) throw DataError("only 8-bit graymaps are supported: " + path.string());

    std::vector<std::uint8_t> pixels(static_cast<std::size_t>(rows) * cols);
    if (magic == "P5") {
        // next_token consumed exactly one whitespace byte after maxval.
        in.read(reinterpret_cast<char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
        if (in.gcount() != static_cast<std::streamsize>(pixels.size()))
            throw DataError("truncated raster data in " + path.string());
    } else {
        for (auto& px : pixels) {
            const std::string tok = next_token(in);
            if (tok.empty()) throw DataError("truncated raster data in " + path.string());
            const int v = parse_positive(tok, path);
            if (v > maxval) throw DataError("pixel exceeds maxval in " + path.string());
            px = static_cast<std::uint8_t>(v);
        }
    }
    return Raster(ImageGeometry{rows, cols}, std::move(pixels));
}

void write_pgm(const std::filesystem::path& path, const Raster& raster) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write image " + path.string());
    out << "P5\n" << raster.cols() << ' ' << raster.rows() << "\n255\n";
    out.write(reinterpret_cast<const char*>(raster.pixels.data()), static_cast<std::streamsize>(raster.pixels.size()));
    if (!out) throw DataError("failed writing image " + path.string());
}

} // namespace attnpca
