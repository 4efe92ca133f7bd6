#pragma once

#include <stdexcept>
#include <string>

namespace carleson {

// Library error with a stable machine-readable code alongside the message.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(code + ": " + what), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

namespace errc {
inline constexpr const char* empty_space = "EmptySpace";
inline constexpr const char* negative_weight = "NegativeWeight";
inline constexpr const char* unknown_point = "UnknownPoint";
inline constexpr const char* delta_too_large = "DeltaTooLarge";
inline constexpr const char* generation_out_of_range = "GenerationOutOfRange";
inline constexpr const char* mismatched_delta = "MismatchedDelta";
inline constexpr const char* bad_cube_entry = "BadCubeEntry";
inline constexpr const char* unknown_index = "UnknownIndex";
inline constexpr const char* ball_too_small = "BallTooSmall";
inline constexpr const char* not_adjacent_scales = "NotAdjacentScales";
inline constexpr const char* outside_bidisc = "OutsideBidisc";
inline constexpr const char* not_rect_union = "NotRectUnion";
inline constexpr const char* bad_config = "BadConfig";
inline constexpr const char* bad_file = "BadFile";
}  // namespace errc

}  // namespace carleson
