#pragma once

#include "mlnoise/losses.hpp"
#include "mlnoise/model.hpp"

namespace mlnoise {

// Statistically consistent training: the standard trainer driven by the
// requested corrected loss.
TrainResult train_consistent(const MultiLabelDataset& ds_noisy,
                             const std::vector<TransitionMatrix2>& t_hat, LossMode mode,
                             TrainConfig config);

}  // namespace mlnoise
