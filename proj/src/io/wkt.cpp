#include "elfkit/io/wkt.hpp"

#include <cctype>
#include <cstdio>
#include <stdexcept>

namespace elfkit::io {

namespace {

std::string format_coord(double v, int precision) {
    char buf[48];
    if (precision < 0) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
    } else {
        std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
    }
    return buf;
}

void append_ring(std::string& out, const Ring& ring, int precision) {
    out += '(';
    for (std::size_t i = 0; i < ring.size(); ++i) {
        if (i > 0) {
            out += ", ";
        }
        out += format_coord(ring[i].x(), precision);
        out += ' ';
        out += format_coord(ring[i].y(), precision);
    }
    out += ')';
}

struct Cursor {
    const std::string& text;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) {
            ++pos;
        }
    }
    bool eat(char c) {
        skip_ws();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!eat(c)) {
            throw std::invalid_argument("wkt: expected '" + std::string(1, c) + "' at offset " +
                                        std::to_string(pos));
        }
    }
    double number() {
        skip_ws();
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(text.substr(pos), &used);
        } catch (const std::exception&) {
            throw std::invalid_argument("wkt: expected a number at offset " + std::to_string(pos));
        }
        pos += used;
        return v;
    }
};

Ring parse_ring(Cursor& cur) {
    cur.expect('(');
    Ring ring;
    do {
        const double x = cur.number();
        const double y = cur.number();
        ring.emplace_back(x, y);
    } while (cur.eat(','));
    cur.expect(')');
    return ring;
}

}  // namespace

std::string to_wkt(const GeoPolygon& polygon, int precision) {
    std::string out = "POLYGON (";
    append_ring(out, polygon.exterior(), precision);
    for (const Ring& hole : polygon.holes()) {
        out += ", ";
        append_ring(out, hole, precision);
    }
    out += ')';
    return out;
}

std::string to_wkt(const OrientedRect& rect, int precision) {
    const auto corners = rect.corners();
    Ring ring(corners.begin(), corners.end());
    ring.push_back(corners[0]);
    std::string out = "POLYGON (";
    append_ring(out, ring, precision);
    out += ')';
    return out;
}

GeoPolygon polygon_from_wkt(const std::string& wkt) {
    Cursor cur{wkt};
    cur.skip_ws();
    constexpr char kTag[] = "POLYGON";
    if (wkt.compare(cur.pos, sizeof(kTag) - 1, kTag) != 0) {
        throw std::invalid_argument("wkt: only POLYGON geometries are supported");
    }
    cur.pos += sizeof(kTag) - 1;
    cur.expect('(');
    Ring exterior = parse_ring(cur);
    std::vector<Ring> holes;
    while (cur.eat(',')) {
        holes.push_back(parse_ring(cur));
    }
    cur.expect(')');
    GeoPolygon polygon(std::move(exterior), std::move(holes));
    polygon.validate_topology();
    return polygon;
}

}  // namespace elfkit::io
