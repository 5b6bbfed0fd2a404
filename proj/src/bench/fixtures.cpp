// SPDX-License-Identifier: Apache-2.0
#include <unistd.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>

#include "geoagent/bench/runner.hpp"
#include "geoagent/raster/io.hpp"

namespace geoagent::bench {

namespace {

using raster::DataType;
using raster::Raster;

// splitmix64; the standard distributions are not portable across libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : s_(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (s_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

private:
    std::uint64_t s_;
};

void put_le(std::vector<std::uint8_t>& out, std::uint64_t bits, int n) {
    for (int i = 0; i < n; ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
}

raster::GeoRef utm_georef(double pixel) {
    constexpr double ox = 500000.0, oy = 4200000.0;
    raster::GeoRef g;
    raster::GeoTag scale{33550, 12, 3, {}};
    for (double d : {pixel, pixel, 0.0}) put_le(scale.bytes, std::bit_cast<std::uint64_t>(d), 8);
    raster::GeoTag tie{33922, 12, 6, {}};
    for (double d : {0.0, 0.0, 0.0, ox, oy, 0.0}) put_le(tie.bytes, std::bit_cast<std::uint64_t>(d), 8);
    raster::GeoTag keys{34735, 3, 8, {}};
    for (std::uint16_t k : {1, 1, 0, 1, 3072, 0, 1, 32633}) put_le(keys.bytes, k, 2);
    g.tags = {scale, tie, keys};
    g.affine = raster::Affine{ox, oy, pixel, -pixel};
    return g;
}

using PixelFn = std::function<double(std::size_t row, std::size_t col)>;

Raster grid(std::size_t w, std::size_t h, DataType dt, const PixelFn& fn) {
    Raster r(w, h, 1, dt);
    for (std::size_t row = 0; row < h; ++row)
        for (std::size_t col = 0; col < w; ++col) r.at(0, row, col) = fn(row, col);
    raster::narrow_to_dtype(r);
    return r;
}

void save_tif(const fs::path& dir, const std::string& name, Raster r, double pixel = 30.0) {
    r.set_geo(utm_georef(pixel));
    fs::create_directories((dir / name).parent_path());
    raster::write_tiff(r, dir / name);
}

void save_png(const fs::path& dir, const std::string& name, const Raster& r) {
    fs::create_directories((dir / name).parent_path());
    raster::write_png(r, dir / name);
}

Raster rgb_noise(std::size_t w, std::size_t h, Rng& rng) {
    Raster r(w, h, 3, DataType::U8);
    for (double& v : r.data()) v = std::floor(rng.uniform(0.0, 256.0));
    return r;
}

json from(int step) { return {{"$from", step}}; }
json from(int step, json field) { return {{"$from", step}, {"field", std::move(field)}}; }

struct Fixture {
    std::string id;
    Modality modality;
    std::string query_ap;
    std::string query_if;
    eval::AnswerRule rule;
    std::function<void(const fs::path& data, Rng& rng)> make_data;
    std::function<json()> plan;  ///< steps and optional answer
};

eval::AnswerRule text_rule() {
    eval::AnswerRule r;
    r.kind = eval::AnswerRule::Kind::StringNormalized;
    return r;
}

std::vector<std::string> names(const std::string& fmt_prefix, const std::vector<std::string>& keys,
                               const std::string& suffix) {
    std::vector<std::string> out;
    for (const auto& k : keys) out.push_back(fmt_prefix + k + suffix);
    return out;
}

std::vector<Fixture> catalogue() {
    std::vector<Fixture> f;

    // ---- Spectrum ---------------------------------------------------------
    f.push_back({"ndvi_mean", Modality::Spectrum,
                 "What is the average NDVI across the three Landsat scenes in this directory? "
                 "Band B4 is red and band B5 is near infrared.",
                 "Compute NDVI for the three scenes with calculate_batch_ndvi (NIR = *_B5.tif, "
                 "red = *_B4.tif, output_dir 'ndvi'), then average the per-image means with "
                 "calc_batch_image_mean_mean.",
                 {},
                 [](const fs::path& d, Rng& rng) {
                     for (int s = 1; s <= 3; ++s) {
                         const std::string p = "scene_" + std::to_string(s);
                         save_tif(d, p + "_B4.tif", grid(24, 24, DataType::F32, [&](auto, auto) {
                                      return rng.uniform(0.04, 0.14);
                                  }));
                         save_tif(d, p + "_B5.tif", grid(24, 24, DataType::F32, [&](auto, auto) {
                                      return rng.uniform(0.28, 0.52);
                                  }));
                     }
                 },
                 [] {
                     const std::vector<std::string> k{"1", "2", "3"};
                     return json{{"steps",
                                  {{{"tool", "calculate_batch_ndvi"},
                                    {"input",
                                     {{"nir_paths", names("scene_", k, "_B5.tif")},
                                      {"red_paths", names("scene_", k, "_B4.tif")},
                                      {"output_dir", "ndvi"}}}},
                                   {{"tool", "calc_batch_image_mean_mean"}, {"input", {{"file_list", from(0)}}}}}}};
                 }});

    f.push_back({"lst_multichannel", Modality::Spectrum,
                 "Estimate the mean land surface temperature of this MODIS tile in degrees Celsius "
                 "from its two thermal bands.",
                 "Run lst_multi_channel on band31.tif and band32.tif (output_path 'lst.tif'), take "
                 "the mean with calc_batch_image_mean_mean, and convert it with kelvin_to_celsius.",
                 {},
                 [](const fs::path& d, Rng& rng) {
                     std::vector<double> t31;
                     save_tif(d, "band31.tif", grid(20, 20, DataType::F32, [&](auto, auto) {
                                  t31.push_back(rng.uniform(292.0, 306.0));
                                  return t31.back();
                              }));
                     std::size_t i = 0;
                     save_tif(d, "band32.tif", grid(20, 20, DataType::F32, [&](auto, auto) {
                                  return t31[i++] - rng.uniform(0.5, 3.0);
                              }));
                 },
                 [] {
                     return json{{"steps",
                                  {{{"tool", "lst_multi_channel"},
                                    {"input",
                                     {{"band31_path", "band31.tif"},
                                      {"band32_path", "band32.tif"},
                                      {"output_path", "lst.tif"}}}},
                                   {{"tool", "calc_batch_image_mean_mean"},
                                    {"input", {{"file_list", json::array({from(0)})}}}},
                                   {{"tool", "kelvin_to_celsius"}, {"input", {{"kelvin", from(1)}}}}}}};
                 }});

    f.push_back({"burn_severity", Modality::Spectrum,
                 "How many pixels burned with at least moderate severity (dNBR above 0.27) "
                 "between the pre-fire and post-fire scenes?",
                 "Compute NBR for pre and post scenes with calculate_batch_nbr (NIR = *_B5.tif, "
                 "SWIR = *_B7.tif, output_dir 'nbr'), subtract post from pre with "
                 "calculate_tif_difference (output_path 'dnbr.tif'), then count pixels above 0.27 "
                 "with count_above_threshold.",
                 {},
                 [](const fs::path& d, Rng& rng) {
                     auto burned = [](std::size_t r, std::size_t c) { return r >= 8 && r < 20 && c >= 10 && c < 26; };
                     save_tif(d, "pre_B5.tif", grid(32, 32, DataType::F32, [&](auto, auto) { return rng.uniform(0.35, 0.45); }));
                     save_tif(d, "pre_B7.tif", grid(32, 32, DataType::F32, [&](auto, auto) { return rng.uniform(0.10, 0.18); }));
                     save_tif(d, "post_B5.tif", grid(32, 32, DataType::F32, [&](auto r, auto c) {
                                  return burned(r, c) ? rng.uniform(0.12, 0.22) : rng.uniform(0.34, 0.44);
                              }));
                     save_tif(d, "post_B7.tif", grid(32, 32, DataType::F32, [&](auto r, auto c) {
                                  return burned(r, c) ? rng.uniform(0.22, 0.32) : rng.uniform(0.10, 0.18);
                              }));
                 },
                 [] {
                     return json{{"steps",
                                  {{{"tool", "calculate_batch_nbr"},
                                    {"input",
                                     {{"nir_paths", {"pre_B5.tif", "post_B5.tif"}},
                                      {"swir_paths", {"pre_B7.tif", "post_B7.tif"}},
                                      {"output_dir", "nbr"}}}},
                                   {{"tool", "calculate_tif_difference"},
                                    {"input",
                                     {{"image_a_path", from(0, 1)},
                                      {"image_b_path", from(0, 0)},
                                      {"output_path", "dnbr.tif"}}}},
                                   {{"tool", "count_above_threshold"},
                                    {"input", {{"image_path", from(1)}, {"threshold", 0.27}}}}}}};
                 }});

    f.push_back({"ndvi_trend", Modality::Spectrum,
                 "By how much does the mean NDVI of this field change per year from 2018 to 2023?",
                 "Compute NDVI for each year with calculate_batch_ndvi (NIR = ndvi_<year>_B5.tif, "
                 "red = ndvi_<year>_B4.tif, output_dir 'ndvi'), take per-image means with "
                 "calc_batch_image_mean, fit compute_linear_trend and report the slope.",
                 {},
                 [](const fs::path& d, Rng& rng) {
                     for (int y = 2018; y <= 2023; ++y) {
                         const std::string p = "ndvi_" + std::to_string(y);
                         const double gain = 0.02 * (y - 2018);
                         save_tif(d, p + "_B4.tif", grid(16, 16, DataType::F32, [&](auto, auto) { return rng.uniform(0.08, 0.12); }));
                         save_tif(d, p + "_B5.tif", grid(16, 16, DataType::F32, [&](auto, auto) {
                                      return rng.uniform(0.30, 0.36) + gain;
                                  }));
                     }
                 },
                 [] {
                     const std::vector<std::string> k{"2018", "2019", "2020", "2021", "2022", "2023"};
                     return json{{"steps",
                                  {{{"tool", "calculate_batch_ndvi"},
                                    {"input",
                                     {{"nir_paths", names("ndvi_", k, "_B5.tif")},
                                      {"red_paths", names("ndvi_", k, "_B4.tif")},
                                      {"output_dir", "ndvi"}}}},
                                   {{"tool", "calc_batch_image_mean"}, {"input", {{"file_list", from(0)}}}},
                                   {{"tool", "compute_linear_trend"}, {"input", {{"values", from(1)}}}}}},
                                 {"final_answer", {{"value", from(-1, "slope")}}}};
                 }});

    // ---- Products ---------------------------------------------------------
    f.push_back({"lst_vegetation", Modality::Products,
                 "What is the mean land surface temperature in Celsius over densely vegetated "
                 "pixels (NDVI above 0.3) in the two acquisitions?",
                 "Call calculate_mean_lst_by_ndvi with lst_paths lst_1.tif and lst_2.tif, "
                 "ndvi_paths ndvi_1.tif and ndvi_2.tif, ndvi_threshold 0.3 and mode 'above', then "
                 "convert the result with kelvin_to_celsius.",
                 {},
                 [](const fs::path& d, Rng& rng) {
                     for (int s = 1; s <= 2; ++s) {
                         std::vector<double> ndvi;
                         save_tif(d, "ndvi_" + std::to_string(s) + ".tif",
                                  grid(24, 24, DataType::F32, [&](auto, auto) {
                                      ndvi.push_back(rng.uniform(-0.1, 0.8));
                                      return ndvi.back();
                                  }),
                                  1000.0);
                         std::size_t i = 0;
                         save_tif(d, "lst_" + std::to_string(s) + ".tif",
                                  grid(24, 24, DataType::F32, [&](auto, auto) {
                                      return 318.0 - 16.0 * ndvi[i++] + rng.uniform(-1.0, 1.0);
                                  }),
                                  1000.0);
                     }
                 },
                 [] {
                     return json{{"steps",
                                  {{{"tool", "calculate_mean_lst_by_ndvi"},
                                    {"input",
                                     {{"lst_paths", {"lst_1.tif", "lst_2.tif"}},
                                      {"ndvi_paths", {"ndvi_1.tif", "ndvi_2.tif"}},
                                      {"ndvi_threshold", 0.3},
                                      {"mode", "above"}}}},
                                   {{"tool", "kelvin_to_celsius"}, {"input", {{"kelvin", from(0)}}}}}}};
                 }});

    f.push_back({"fire_direction", Modality::Products,
                 "Relative to the tile centre, in which direction are the fire hotspots "
                 "(fire radiative power above 50 MW) concentrated?",
                 "Threshold frp.tif at 50 with calculate_batch_frp (output_dir 'hotspots') and "
                 "report the dominant direction from analyze_hotspot_direction.",
                 text_rule(),
                 [](const fs::path& d, Rng& rng) {
                     save_tif(d, "frp.tif", grid(32, 32, DataType::F32, [&](auto r, auto c) {
                                  const bool front = c >= 22 && r >= 6 && r < 26;
                                  const bool spot = r == 3 && c == 5;
                                  return (front || spot) && rng.uniform(0.0, 1.0) < 0.7
                                             ? rng.uniform(60.0, 400.0)
                                             : rng.uniform(0.0, 20.0);
                              }), 1000.0);
                 },
                 [] {
                     return json{{"steps",
                                  {{{"tool", "calculate_batch_frp"},
                                    {"input",
                                     {{"input_paths", {"frp.tif"}}, {"threshold", 50}, {"output_dir", "hotspots"}}}},
                                   {{"tool", "analyze_hotspot_direction"},
                                    {"input", {{"hotspot_map_path", from(0, 0)}}}}}},
                                 {"final_answer", {{"value", from(-1, "dominant")}}}};
                 }});

    f.push_back({"ndvi_mk", Modality::Products,
                 "Does the annual NDVI product for 2015 to 2024 show a significant monotonic trend? "
                 "Answer increasing, decreasing or no trend.",
                 "Compute the mean of each ndvi_<year>.tif with calc_batch_image_mean, run "
                 "mann_kendall_test on the means and report its trend.",
                 text_rule(),
                 [](const fs::path& d, Rng& rng) {
                     for (int y = 2015; y <= 2024; ++y) {
                         const double base = 0.62 - 0.018 * (y - 2015);
                         save_tif(d, "ndvi_" + std::to_string(y) + ".tif",
                                  grid(16, 16, DataType::F32, [&](auto, auto) { return base + rng.uniform(-0.05, 0.05); }),
                                  1000.0);
                     }
                 },
                 [] {
                     std::vector<std::string> files;
                     for (int y = 2015; y <= 2024; ++y) files.push_back("ndvi_" + std::to_string(y) + ".tif");
                     return json{{"steps",
                                  {{{"tool", "calc_batch_image_mean"}, {"input", {{"file_list", files}}}},
                                   {{"tool", "mann_kendall_test"}, {"input", {{"values", from(0)}}}}}},
                                 {"final_answer", {{"value", from(-1, "trend")}}}};
                 }});

    f.push_back({"peak_month", Modality::Products,
                 "What was the hottest pixel temperature in Celsius across the twelve monthly "
                 "land surface temperature products?",
                 "Take the maximum of each lst_month_<MM>.tif with calc_batch_image_max, find the "
                 "largest with max_value_and_index, and convert its value with kelvin_to_celsius.",
                 {},
                 [](const fs::path& d, Rng& rng) {
                     for (int m = 1; m <= 12; ++m) {
                         const double season = 288.0 + 14.0 * std::sin((m - 4) * 3.14159265358979 / 6.0);
                         char name[32];
                         std::snprintf(name, sizeof name, "lst_month_%02d.tif", m);
                         save_tif(d, name, grid(16, 16, DataType::F32, [&](auto, auto) { return season + rng.uniform(-3.0, 3.0); }),
                                  1000.0);
                     }
                 },
                 [] {
                     std::vector<std::string> files;
                     for (int m = 1; m <= 12; ++m) {
                         char name[32];
                         std::snprintf(name, sizeof name, "lst_month_%02d.tif", m);
                         files.emplace_back(name);
                     }
                     return json{{"steps",
                                  {{{"tool", "calc_batch_image_max"}, {"input", {{"file_list", files}}}},
                                   {{"tool", "max_value_and_index"}, {"input", {{"values", from(0)}}}},
                                   {{"tool", "kelvin_to_celsius"}, {"input", {{"kelvin", from(1, "value")}}}}}}};
                 }});

    // ---- RGB --------------------------------------------------------------
    f.push_back({"scene_class", Modality::RGB,
                 "What kind of scene does airport_01.png show?",
                 "Classify airport_01.png with RemoteCLIP and report the label.",
                 text_rule(),
                 [](const fs::path& d, Rng& rng) {
                     save_png(d, "airport_01.png", rgb_noise(48, 48, rng));
                     write_json_file(d / kExpertManifest,
                                     {{"entries",
                                       {{{"image", "airport_01"}, {"task", "classify"}, {"model", "RemoteCLIP"},
                                         {"prompt", nullptr}, {"result", "airport"}}}}});
                 },
                 [] {
                     return json{{"steps", {{{"tool", "RemoteCLIP"}, {"input", {{"image_path", "airport_01.png"}}}}}}};
                 }});

    f.push_back({"ship_spread", Modality::RGB,
                 "How far apart, in pixels, are the two most distant ships in harbor_03.png?",
                 "Detect ships in harbor_03.png with Strip_R_CNN (text_prompt 'ship'), convert the "
                 "boxes with bboxes2centroids, and report the farthest distance from "
                 "centroid_distance_extremes.",
                 {},
                 [](const fs::path& d, Rng& rng) {
                     save_png(d, "harbor_03.png", rgb_noise(64, 64, rng));
                     json boxes = json::array();
                     for (int i = 0; i < 5; ++i) {
                         const double x = std::floor(rng.uniform(0.0, 54.0));
                         const double y = std::floor(rng.uniform(0.0, 54.0));
                         boxes.push_back({x, y, x + 4.0 + i, y + 8.0});
                     }
                     write_json_file(d / kExpertManifest,
                                     {{"entries",
                                       {{{"image", "harbor_03"}, {"task", "detect"}, {"model", "Strip_R_CNN"},
                                         {"prompt", "ship"}, {"result", boxes}}}}});
                 },
                 [] {
                     return json{{"steps",
                                  {{{"tool", "Strip_R_CNN"},
                                    {"input", {{"image_path", "harbor_03.png"}, {"text_prompt", "ship"}}}},
                                   {{"tool", "bboxes2centroids"}, {"input", {{"bboxes", from(0)}}}},
                                   {{"tool", "centroid_distance_extremes"}, {"input", {{"centroids", from(1)}}}}}},
                                 {"final_answer", {{"value", from(-1, json::array({"farthest", "distance"}))}}}};
                 }});

    f.push_back({"water_area", Modality::RGB,
                 "What is the water surface area in square metres in lake_07.png? Water pixels are "
                 "brighter than 128 and each pixel covers 0.25 square metres.",
                 "Segment lake_07.png with threshold_segmentation at 128 (output_path "
                 "'water_mask.tif'), then measure it with calculate_area using pixel_area 0.25.",
                 {},
                 [](const fs::path& d, Rng& rng) {
                     Raster r = grid(40, 40, DataType::U8, [&](auto row, auto col) {
                         const double dx = static_cast<double>(col) - 18.0, dy = static_cast<double>(row) - 22.0;
                         const bool lake = dx * dx / 144.0 + dy * dy / 81.0 < 1.0;
                         return std::floor(lake ? rng.uniform(150.0, 250.0) : rng.uniform(10.0, 120.0));
                     });
                     save_png(d, "lake_07.png", r);
                 },
                 [] {
                     return json{{"steps",
                                  {{{"tool", "threshold_segmentation"},
                                    {"input",
                                     {{"image_path", "lake_07.png"}, {"threshold", 128}, {"output_path", "water_mask.tif"}}}},
                                   {{"tool", "calculate_area"},
                                    {"input", {{"image_path", from(0)}, {"pixel_area", 0.25}}}}}}};
                 }});

    f.push_back({"change_regions", Modality::RGB,
                 "How many separate changed regions are there between pre_12.png and post_12.png?",
                 "Run ChangeOS on pre_12.png and post_12.png (output_path 'change_mask.tif') and "
                 "count the regions with count_skeleton_contours.",
                 {},
                 [](const fs::path& d, Rng& rng) {
                     save_png(d, "pre_12.png", rgb_noise(48, 48, rng));
                     save_png(d, "post_12.png", rgb_noise(48, 48, rng));
                     save_tif(d, "masks/change_12.tif", grid(48, 48, DataType::U8, [](auto r, auto c) {
                                  const bool a = r >= 4 && r < 14 && c >= 4 && c < 16;
                                  const bool b = r >= 20 && r < 30 && c >= 28 && c < 44;
                                  const bool e = r >= 34 && r < 44 && c >= 6 && c < 18;
                                  return a || b || e ? 255.0 : 0.0;
                              }), 0.5);
                     write_json_file(d / kExpertManifest,
                                     {{"entries",
                                       {{{"image", "pre_12"}, {"task", "change"}, {"model", "ChangeOS"},
                                         {"prompt", nullptr}, {"result", {{"mask", "masks/change_12.tif"}}}}}}});
                 },
                 [] {
                     return json{{"steps",
                                  {{{"tool", "ChangeOS"},
                                    {"input",
                                     {{"pre_image_path", "pre_12.png"},
                                      {"post_image_path", "post_12.png"},
                                      {"output_path", "change_mask.tif"}}}},
                                   {{"tool", "count_skeleton_contours"}, {"input", {{"image_path", from(0)}}}}}}};
                 }});

    return f;
}

} // namespace

std::vector<TaskSpec> generate_fixtures(const fs::path& dir, const tools::Registry& registry) {
    for (const char* sub : {"data", "plans", "tasks"}) fs::remove_all(dir / sub);

    std::vector<TaskSpec> out;
    std::uint64_t seed = 20240601;
    for (const Fixture& fx : catalogue()) {
        const fs::path data = dir / "data" / fx.id;
        fs::create_directories(data);
        Rng rng(seed++);
        fx.make_data(data, rng);

        Plan plan = Plan::from_json(fx.plan());
        plan.rule = fx.rule;
        write_json_file(dir / "plans" / (fx.id + ".json"), plan.to_json());

        const fs::path scratch =
            fs::temp_directory_path() / ("geoagent_annotate_" + std::to_string(::getpid()) + "_" + fx.id);
        fs::remove_all(scratch);
        fs::create_directories(scratch);
        eval::GroundTruth gt;
        try {
            const TaskEnv env(scratch, fs::weakly_canonical(data));
            gt = annotate_from_plan(plan, registry, env.context());
        } catch (...) {
            fs::remove_all(scratch);
            throw;
        }
        fs::remove_all(scratch);

        TaskSpec t;
        t.id = fx.id;
        t.modality = fx.modality;
        t.query_ap = fx.query_ap;
        t.query_if = fx.query_if;
        t.data_dir = "../data/" + fx.id;
        t.ground_truth = std::move(gt);
        t.data_root = fs::weakly_canonical(data);
        write_json_file(dir / "tasks" / (fx.id + ".json"), t.to_json());
        out.push_back(std::move(t));
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    return out;
}

} // namespace geoagent::bench
