#include "muxillum/image.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <string>

#include "muxillum/error.hpp"

namespace muxillum {

namespace {

// Reads the next whitespace-delimited header token, skipping '#' comments.
std::string next_token(std::istream& in) {
    std::string token;
    char c = 0;
    while (in.get(c)) {
        if (c == '#') {
            std::string discard;
            std::getline(in, discard);
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!token.empty()) break;
            continue;
        }
        token.push_back(c);
    }
    return token;
}

int parse_header_int(const std::string& token, const std::string& file) {
    try {
        std::size_t used = 0;
        const int v = std::stoi(token, &used);
        if (used != token.size() || v <= 0) throw std::invalid_argument(token);
        return v;
    } catch (const std::exception&) {
        throw FormatError(file, "bad PGM header field '" + token + "'");
    }
}

}  // namespace

PgmData read_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    const std::string file = path.string();
    if (next_token(in) != "P5") throw FormatError(file, "not a binary PGM (P5)");
    PgmData out;
    out.width = parse_header_int(next_token(in), file);
    out.height = parse_header_int(next_token(in), file);
    out.maxval = parse_header_int(next_token(in), file);
    if (out.maxval > 65535) throw FormatError(file, "maxval above 65535");
    const std::size_t count = static_cast<std::size_t>(out.width) * out.height;
    const bool wide = out.maxval > 255;
    std::vector<unsigned char> raw(count * (wide ? 2 : 1));
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size()) throw FormatError(file, "truncated pixel data");
    out.samples.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        out.samples[i] = wide ? static_cast<std::uint16_t>((raw[2 * i] << 8) | raw[2 * i + 1]) : raw[i];
    }
    return out;
}

void write_pgm(const std::filesystem::path& path, const PgmData& data) {
    if (data.maxval <= 0 || data.maxval > 65535) throw ParameterError("PGM maxval out of range");
    if (data.samples.size() != static_cast<std::size_t>(data.width) * data.height) {
        throw ParameterError("PGM sample count does not match dimensions");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << "P5\n" << data.width << ' ' << data.height << '\n' << data.maxval << '\n';
    const bool wide = data.maxval > 255;
    std::vector<unsigned char> raw(data.samples.size() * (wide ? 2 : 1));
    for (std::size_t i = 0; i < data.samples.size(); ++i) {
        const std::uint16_t s = std::min<std::uint16_t>(data.samples[i], static_cast<std::uint16_t>(data.maxval));
        if (wide) {
            raw[2 * i] = static_cast<unsigned char>(s >> 8);
            raw[2 * i + 1] = static_cast<unsigned char>(s & 0xff);
        } else {
            raw[i] = static_cast<unsigned char>(s);
        }
    }
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!out) throw IoError("short write to " + path.string());
}

Image read_pgm_image(const std::filesystem::path& path) {
    const PgmData pgm = read_pgm(path);
    Image img(pgm.width, pgm.height);
    std::transform(pgm.samples.begin(), pgm.samples.end(), img.pixels.begin(),
                   [](std::uint16_t s) { return static_cast<double>(s); });
    return img;
}

void write_pgm8(const std::filesystem::path& path, const Image& image) {
    PgmData pgm{image.width, image.height, 255, std::vector<std::uint16_t>(image.size())};
    for (std::size_t i = 0; i < image.size(); ++i) {
        pgm.samples[i] = static_cast<std::uint16_t>(std::clamp(std::round(image.pixels[i]), 0.0, 255.0));
    }
    write_pgm(path, pgm);
}

}  // namespace muxillum
