#include <bit>
#include <cstring>
#include <sstream>

#include "amq/embedding.hpp"
#include "amq/error.hpp"

namespace amq {

namespace {

void put_u16(std::string& out, std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xFF));
    out.push_back(static_cast<char>(v >> 8));
}

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_str16(std::string& out, std::string_view s, std::string_view what) {
    if (s.size() > 0xFFFF) throw input_error(std::string(what) + " longer than 65535 bytes");
    put_u16(out, static_cast<std::uint16_t>(s.size()));
    out.append(s);
}

class Reader {
public:
    explicit Reader(std::string_view bytes) : bytes_(bytes) {}

    std::size_t offset() const noexcept { return pos_; }
    std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

    std::string_view take(std::size_t n, std::string_view what) {
        if (remaining() < n) throw format_error(pos_, "truncated stream reading " + std::string(what));
        const auto s = bytes_.substr(pos_, n);
        pos_ += n;
        return s;
    }
    std::uint16_t u16(std::string_view what) {
        const auto s = take(2, what);
        return static_cast<std::uint16_t>(static_cast<unsigned char>(s[0]) |
                                          (static_cast<unsigned char>(s[1]) << 8));
    }
    std::uint32_t u32(std::string_view what) {
        const auto s = take(4, what);
        std::uint32_t v = 0;
        for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(s[static_cast<std::size_t>(i)]);
        return v;
    }
    std::string str16(std::string_view what) {
        const std::uint16_t n = u16(what);
        return std::string(take(n, what));
    }

private:
    std::string_view bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

std::string serialize_embeddings(const EmbeddingSet& set) {
    if (set.dims() > 0xFFFFFFFFu || set.size() > 0xFFFFFFFFu) throw input_error("embedding set too large");
    std::string out;
    out.reserve(32 + set.size() * (16 + 4 * set.dims()));
    out.append(kCacheMagic);
    put_u32(out, static_cast<std::uint32_t>(set.dims()));
    put_u32(out, static_cast<std::uint32_t>(set.size()));
    put_str16(out, set.provider_id(), "provider_id");
    put_str16(out, set.vocab_version(), "vocab_version");
    for (const auto& [code, vec] : set.by_code()) {
        put_str16(out, code, "code");
        for (float x : vec.components()) put_u32(out, std::bit_cast<std::uint32_t>(x));
    }
    return out;
}

std::size_t save_embeddings(const EmbeddingSet& set, std::ostream& out) {
    const std::string bytes = serialize_embeddings(set);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw input_error("failed writing embedding cache");
    return bytes.size();
}

EmbeddingSet deserialize_embeddings(std::string_view bytes) {
    Reader r(bytes);
    if (r.take(kCacheMagic.size(), "magic") != kCacheMagic) throw format_error(0, "bad magic");
    const std::size_t dims_offset = r.offset();
    const std::uint32_t dims = r.u32("dims");
    const std::uint32_t count = r.u32("count");
    if (dims == 0 && count > 0) throw format_error(dims_offset, "dims/count mismatch: zero dims with records");
    std::string provider_id = r.str16("provider_id");
    std::string vocab_version = r.str16("vocab_version");

    EmbeddingSet set(dims, std::move(provider_id), std::move(vocab_version));
    for (std::uint32_t i = 0; i < count; ++i) {
        const std::size_t record_offset = r.offset();
        std::string code = r.str16("record code");
        if (code.empty()) throw format_error(record_offset, "empty record code");
        std::vector<float> comps(dims);
        const auto raw = r.take(static_cast<std::size_t>(dims) * 4, "vector data");
        for (std::uint32_t d = 0; d < dims; ++d) {
            std::uint32_t bits = 0;
            for (int k = 3; k >= 0; --k) bits = (bits << 8) | static_cast<unsigned char>(raw[4 * d + static_cast<std::uint32_t>(k)]);
            comps[d] = std::bit_cast<float>(bits);
        }
        if (set.find(code) != nullptr) throw format_error(record_offset, "duplicate code " + code);
        set.insert(std::move(code), Vector(std::move(comps)));
    }
    if (r.remaining() != 0) {
        throw format_error(r.offset(), "dims/count mismatch: " + std::to_string(r.remaining()) + " trailing bytes");
    }
    return set;
}

EmbeddingSet load_embeddings(std::istream& in) {
    std::ostringstream buf;
    buf << in.rdbuf();
    return deserialize_embeddings(buf.str());
}

}  // namespace amq
