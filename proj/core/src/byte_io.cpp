#include "rrfnn/byte_io.hpp"

#include <fstream>

namespace rrfnn::byte_io {

void Writer::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out.write(buffer_.data(), static_cast<std::streamsize>(buffer_.size()));
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

Reader Reader::open(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    std::vector<char> data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("failed reading '" + path.string() + "'");
    return Reader(std::move(data));
}

bool Reader::match_magic(std::string_view magic) {
    if (remaining() < magic.size()) return false;
    if (std::string_view(data_.data() + offset_, magic.size()) != magic) return false;
    offset_ += magic.size();
    return true;
}

void Reader::expect_magic(std::string_view magic, std::string_view what) {
    if (!match_magic(magic)) {
        throw FormatError("not a " + std::string(what) + " file: expected magic '" + std::string(magic) + "'",
                          offset_);
    }
}

void Reader::expect_payload(std::size_t expected) const {
    if (remaining() != expected) {
        throw FormatError("payload size mismatch: header declares " + std::to_string(expected) +
                              " bytes, file holds " + std::to_string(remaining()),
                          offset_);
    }
}

}  // namespace rrfnn::byte_io
