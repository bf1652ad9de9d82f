#include "beam/catalog.hpp"

namespace beam {

namespace {

constexpr const char* kEx1 = R"({
  "name": "ex1_objectivity",
  "description": "Quarter circle, one end rotated ten full turns about X in 100 increments.",
  "provenance": "Rigid rotation of a stress-free rod: Objectivity test 1",
  "geometry": {
    "kind": "arc", "center": [0, 0, 0], "u": [1, 0, 0], "v": [0, 1, 0],
    "radius": 100, "start_angle": 0, "sweep": 1.5707963267948966,
    "degree": 2, "elements": 8, "director_degree": 1, "seed": [0, 0, 1], "director_mode": "D-disc"
  },
  "section": { "width": 1, "height": 1, "density": 1 },
  "material": { "model": "svk", "E": 1e6, "nu": 0 },
  "boundary": {
    "dirichlet": [
      { "label": "A", "xi": 0, "axis": [1, 0, 0], "angle": { "t": [0, 100], "v": [0, 62.83185307179586] } }
    ]
  },
  "solver": { "scheme": "quasistatic", "dt": 1, "steps": 100 },
  "output": { "snapshot_times": [25, 50, 100] }
})";

constexpr const char* kEx2 = R"({
  "name": "ex2_bent_rotation",
  "description": "Straight rod bent by a tip displacement, then nine 10 degree rigid rotations about (1,1,1).",
  "provenance": "Rigid rotation of a bent rod: Objectivity test 2",
  "geometry": {
    "kind": "straight", "start": [0, 0, 2], "end": [0, 0, 5],
    "degree": 3, "elements": 10, "director_degree": 2, "seed": [1, 0, 0]
  },
  "section": { "width": 0.1, "height": 0.1, "density": 1 },
  "material": { "model": "svk", "E": 21e6, "nu": 0.3 },
  "boundary": {
    "dirichlet": [
      { "label": "A", "xi": 0, "axis": [1, 1, 1],
        "angle": { "t": [1, 10], "v": [0, 1.5707963267948966] } },
      { "label": "B", "xi": 1, "fix_directors": false, "axis": [1, 1, 1],
        "angle": { "t": [1, 10], "v": [0, 1.5707963267948966] }, "center": [0, 0, 2],
        "translation": [1, -1, 0], "translation_scale": { "t": [0, 1], "v": [0, 1] } }
    ]
  },
  "solver": { "scheme": "quasistatic", "dt": 0.1, "steps": 100 },
  "output": { "snapshot_times": [1, 10] }
})";

constexpr const char* kEx3 = R"({
  "name": "ex3_torsion_case1",
  "description": "Straight beam twisted by 2 pi, ends rotated by -pi and +pi about the axis.",
  "provenance": "Straight beam under twisting moment, case 1",
  "geometry": {
    "kind": "straight", "start": [0, 0, 0], "end": [10, 0, 0],
    "degree": 3, "elements": 40, "seed": [0, 0, 1]
  },
  "section": { "width": 0.3, "height": 0.4, "density": 1, "eas": { "m1": 2, "m2": 2, "m3": 0, "m4": 4 } },
  "material": { "model": "svk", "E": 210e9, "nu": 0.3 },
  "boundary": {
    "dirichlet": [
      { "label": "A", "xi": 0, "axis": [1, 0, 0], "angle": { "t": [0, 1], "v": [0, -3.141592653589793] } },
      { "label": "B", "xi": 1, "fix_position": [false, true, true], "axis": [1, 0, 0],
        "angle": { "t": [0, 1], "v": [0, 3.141592653589793] } }
    ]
  },
  "solver": { "scheme": "quasistatic", "dt": 0.03125, "steps": 32 },
  "output": { "snapshot_times": [0.5, 1] }
})";

constexpr const char* kEx4 = R"({
  "name": "ex4_ring_twist",
  "description": "Closed ring twisted at two opposite points by 2 pi in opposite directions.",
  "provenance": "Twisting of an elastic ring, case 1",
  "geometry": {
    "kind": "ring", "center": [0, 0, 0], "u": [1, 0, 0], "v": [0, 1, 0],
    "radius": 20, "start_angle": 0, "slot_angle": 0,
    "degree": 2, "elements": 24, "seed": [0, 0, 1]
  },
  "section": { "width": 0.3333333333333333, "height": 1, "density": 1, "eas": { "m1": 2, "m2": 2, "m3": 0, "m4": 4 } },
  "material": { "model": "svk", "E": 21e6, "nu": 0.3 },
  "boundary": {
    "dirichlet": [
      { "label": "A_start", "xi": 0, "axis": [1, 0, 0], "angle": { "t": [0, 1], "v": [0, 6.283185307179586] } },
      { "label": "A_end", "xi": 1, "axis": [1, 0, 0], "angle": { "t": [0, 1], "v": [0, 6.283185307179586] } },
      { "label": "B", "xi": 0.5, "fix_position": [false, true, true], "axis": [1, 0, 0],
        "angle": { "t": [0, 1], "v": [0, -6.283185307179586] } }
    ]
  },
  "solver": { "scheme": "quasistatic", "dt": 0.0625, "steps": 16 },
  "output": { "snapshot_times": [0.25, 0.5, 0.75, 1] }
})";

constexpr const char* kEx5 = R"({
  "name": "ex5_flying_beam",
  "description": "Free straight beam with a linear axial and quadratic transverse initial velocity.",
  "provenance": "Dynamics of a flying beam",
  "geometry": {
    "kind": "straight", "start": [0, 0, 0], "end": [3, 0, 0],
    "degree": 3, "elements": 10, "seed": [0, 0, 1]
  },
  "section": { "width": 0.3, "height": 0.3, "density": 1 },
  "material": { "model": "svk", "E": 21e6, "nu": 0.3 },
  "initial_velocity": { "x": [1, -1], "y": [24.5, -149, 150] },
  "solver": { "scheme": "emc", "dt": 0.1, "steps": 100 },
  "output": { "snapshot_times": [2, 4, 6, 8, 10] }
})";

constexpr const char* kEx6 = R"({
  "name": "ex6_ring",
  "description": "Ring with a 1 degree slot, clamped at one end, traction in Z at the other.",
  "provenance": "Slotted ring with a rectangular cross-section",
  "geometry": {
    "kind": "ring", "center": [0, 0, 0], "u": [1, 0, 0], "v": [0, 1, 0],
    "radius": 1.3, "start_angle": 0, "slot_angle": 0.017453292519943295,
    "degree": 3, "elements": 40, "seed": [0, 0, 1]
  },
  "section": { "width": 0.3, "height": 0.4, "density": 1, "eas": { "m1": 2, "m2": 2, "m3": 0, "m4": 4 } },
  "material": { "model": "svk", "E": 1.12e7, "nu": 0.4 },
  "boundary": {
    "dirichlet": [ { "label": "clamp", "xi": 0 } ]
  },
  "default_case": "dynamic",
  "cases": {
    "static": {
      "material": { "model": "neo-hookean" },
      "boundary": { "end_loads": [ { "xi": 1, "traction": [0, 0, 5e4], "scale": { "t": [0, 1], "v": [0, 1] } } ] },
      "solver": { "scheme": "quasistatic", "dt": 0.05, "steps": 20 },
      "output": { "snapshot_times": [0.5, 1] }
    },
    "dynamic": {
      "boundary": { "end_loads": [ { "xi": 1, "traction": [0, 0, 5e4], "scale": { "t": [0, 10, 20], "v": [0, 10, 0] } } ] },
      "solver": { "scheme": "emc", "dt": 0.2, "steps": 100 },
      "output": { "snapshot_times": [5, 10, 15, 20] }
    }
  }
})";

constexpr const char* kSmokeCantilever = R"({
  "name": "smoke_cantilever",
  "description": "Short clamped beam under a ramped tip force.",
  "provenance": "smoke test",
  "geometry": { "kind": "straight", "start": [0, 0, 0], "end": [1, 0, 0], "degree": 2, "elements": 4, "seed": [0, 0, 1] },
  "section": { "width": 0.1, "height": 0.1, "density": 1 },
  "material": { "model": "svk", "E": 1e7, "nu": 0.3 },
  "boundary": {
    "dirichlet": [ { "label": "clamp", "xi": 0 } ],
    "end_loads": [ { "xi": 1, "force": [0, 0, -10], "scale": { "t": [0, 1], "v": [0, 1] } } ]
  },
  "solver": { "scheme": "quasistatic", "dt": 0.25, "steps": 4 },
  "output": { "snapshot_times": [1] }
})";

constexpr const char* kSmokeFreeFlight = R"({
  "name": "smoke_free_flight",
  "description": "Unconstrained beam translating at constant velocity.",
  "provenance": "smoke test",
  "geometry": { "kind": "straight", "start": [0, 0, 0], "end": [1, 0, 0], "degree": 2, "elements": 2, "seed": [0, 0, 1] },
  "section": { "width": 0.1, "height": 0.1, "density": 1 },
  "material": { "model": "svk", "E": 1e7, "nu": 0.3 },
  "initial_velocity": { "x": [0.5], "y": [0.2] },
  "solver": { "scheme": "emc", "dt": 0.1, "steps": 5 }
})";

}  // namespace

const std::vector<CatalogEntry>& catalog() {
    static const std::vector<CatalogEntry> entries = {
        {"ex1_objectivity", "Rigid rotation of a stress-free rod: Objectivity test 1",
         "quarter circle rotated ten turns, strain energy stays at round-off", kEx1},
        {"ex2_bent_rotation", "Rigid rotation of a bent rod: Objectivity test 2",
         "bent rod under superposed rigid rotations, constant strain energy", kEx2},
        {"ex3_torsion_case1", "Straight beam under twisting moment, case 1",
         "free-free torsion of a 0.3 x 0.4 section", kEx3},
        {"ex4_ring_twist", "Twisting of an elastic ring, case 1", "ring folded by opposite end rotations, path independence",
         kEx4},
        {"ex5_flying_beam", "Dynamics of a flying beam", "free flight, momentum and energy conservation", kEx5},
        {"ex6_ring", "Slotted ring with a rectangular cross-section",
         "cases static (neo-hookean) and dynamic (ramp load, energy consistency)", kEx6},
        {"smoke_cantilever", "smoke test", "small cantilever under a tip force", kSmokeCantilever},
        {"smoke_free_flight", "smoke test", "rigid translation with the EMC scheme", kSmokeFreeFlight},
    };
    return entries;
}

const CatalogEntry* find_example(std::string_view name) {
    for (const auto& e : catalog())
        if (e.name == name) return &e;
    return nullptr;
}

}  // namespace beam
