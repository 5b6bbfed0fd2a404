// SPDX-License-Identifier: Apache-2.0
#include "geoagent/stats/landsat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "geoagent/error.hpp"
#include "geoagent/raster/pixelwise.hpp"
#include "geoagent/simd/kernels.hpp"

namespace geoagent::stats {

Raster radiometric_correction_sr(const Raster& dn) {
    if (dn.dtype() != raster::DataType::U16)
        throw Error(Errc::WrongDtype, "surface reflectance correction expects u16 DN, got " +
                                          std::string(raster::dtype_name(dn.dtype())));
    const auto src = dn.masked_band(0);
    std::vector<double> out(src.size());
    simd::scale_offset(src, kSrScale, kSrOffset, out);
    for (double& v : out)
        if (!std::isnan(v)) v = std::clamp(v, 0.0, 1.0);
    return raster::make_f32_like(dn, std::move(out));
}

Raster apply_cloud_mask(const Raster& band, const Raster& qa) {
    if (qa.dtype() != raster::DataType::U16)
        throw Error(Errc::WrongDtype, "QA_PIXEL must be u16, got " +
                                          std::string(raster::dtype_name(qa.dtype())));
    raster::require_same_grid(band, qa);
    auto values = band.masked_band(0);
    const auto bits = qa.band(0);
    for (std::size_t i = 0; i < values.size(); ++i)
        if (static_cast<std::uint16_t>(bits[i]) & kCloudBits)
            values[i] = std::numeric_limits<double>::quiet_NaN();
    return raster::make_f32_like(band, std::move(values));
}

} // namespace geoagent::stats
