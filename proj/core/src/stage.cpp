#include <array>
#include <string>

#include "evoman/errors.hpp"
#include "evoman/stage.hpp"

namespace evoman {
namespace {

StageLayout make_stage(int id, std::vector<Rect> platforms) {
    StageLayout s;
    s.id = id;
    s.platforms = std::move(platforms);
    return s;
}

const std::array<StageLayout, stage_count>& stage_table() {
    static const std::array<StageLayout, stage_count> table{
        make_stage(1, {}),
        make_stage(2, {{{140, 380}, {260, 396}}, {{476, 380}, {596, 396}}}),
        make_stage(3, {{{300, 360}, {436, 376}}}),
        make_stage(4, {}),
        make_stage(5, {{{200, 420}, {300, 436}}, {{436, 420}, {536, 436}}}),
        make_stage(6, {{{268, 330}, {468, 346}}}),
        make_stage(7, {}),
        make_stage(8, {{{120, 400}, {220, 416}}, {{516, 400}, {616, 416}}}),
    };
    return table;
}

}  // namespace

const StageLayout& builtin_stage(int id) {
    if (id < 1 || id > stage_count) {
        throw ConfigError("unknown stage id " + std::to_string(id) + " (expected 1-8)");
    }
    return stage_table()[static_cast<std::size_t>(id - 1)];
}

}  // namespace evoman
