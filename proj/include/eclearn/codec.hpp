#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "eclearn/messages.hpp"

namespace eclearn {

// Raised on malformed frames or payloads; `offset` is the byte position in
// the input buffer where decoding failed.
struct CodecError : std::runtime_error {
    size_t offset;
    CodecError(const std::string& what, size_t off) : std::runtime_error(what), offset(off) {}
};

// Wire format: a 4-byte big-endian payload length followed by a UTF-8 JSON
// object {v, type, seq, sender, to, body}. Clause heads/bodies travel as
// canonical literal strings.
std::vector<std::uint8_t> encode_message(const Envelope& env);

// Decodes one frame starting at `offset` in buf; advances offset past the
// frame. Throws CodecError if the frame is truncated or the payload is
// malformed.
Envelope decode_message(const std::vector<std::uint8_t>& buf, size_t& offset);

// Payload helpers shared by the framing layer and the socket transport.
std::string encode_payload(const Envelope& env);
Envelope decode_payload(const std::string& json, size_t base_offset = 0);

}  // namespace eclearn
