"""Per-kind attention timing, Q/K/V range statistics and the recommended quantization schemes."""
import logging

from scenegen.attention import collect_range_stats, profile_block_kinds, profile_records
from scenegen.attention.quantization import recommend_scheme
from scenegen.diffusion import ToyDiT, build_conditioning, measure_quant_accuracy
from scenegen.metrics import RunReport

from .base import Workflow

logger = logging.getLogger(__name__)


class ProfilingWorkflow(Workflow):
    command = "profile"

    def profile(self) -> None:
        cfg = self.config
        dit = cfg.dit_config
        schemes = cfg.quant.scheme_map()
        with self.stage("profile"):
            model = ToyDiT(dit)
            cond = build_conditioning(cfg.prompt, cfg.boxes, cfg.grid, dim=dit.cond_dim)
            sample_input = model.sample_input(cond.combined)
            timings = profile_block_kinds(model, sample_input, cfg.quant.profile_repetitions)
            ranges = collect_range_stats(model, sample_input)
            recommended = recommend_scheme(ranges)
            if schemes:
                accuracy = measure_quant_accuracy(model, sample_input, schemes)
                self.report.quantization = {kind.value: vars(r) for kind, r in accuracy.items()}

        self.collector.record_block_timings({k.value: {"seconds": t.total_time} for k, t in timings.items()})
        self.report.sections["profile"] = {
            "block_profile": profile_records(timings),
            "range_stats": [r.to_record() for r in ranges],
            "recommended": {kind.value: scheme.to_record() for kind, scheme in recommended.items()},
        }

    def run(self) -> RunReport:
        self.profile()
        return self.finish()
