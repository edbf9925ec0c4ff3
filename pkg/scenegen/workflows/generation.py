"""Stage 1: frames from the prompt and box layout (or rendered from the synthetic scene)."""
import logging
from pathlib import Path
from typing import List

from scenegen.diffusion import build_conditioning, sample
from scenegen.metrics import RunReport
from scenegen.reconstruction import render_ground_truth
from scenegen.storage import save_frames

from .base import FRAMES_DIRNAME, Workflow

logger = logging.getLogger(__name__)


class GenerationWorkflow(Workflow):
    command = "generate"

    @property
    def frames_dir(self) -> Path:
        return self.output_dir / FRAMES_DIRNAME

    def generate(self) -> List[Path]:
        cfg = self.config
        with self.stage("generate"):
            if cfg.frames_source == "synthetic":
                store = render_ground_truth(cfg.scene, cfg.trajectory)
                frames = [store.views_at(t) for t in range(store.timesteps)]
                section = {"source": "synthetic"}
            else:
                dit = cfg.dit_config
                policy = cfg.cache_policy()
                cond = build_conditioning(cfg.prompt, cfg.boxes, cfg.grid, dim=dit.cond_dim)
                frames, run = sample(dit, cond, policy, schemes=cfg.quant.scheme_map(),
                                     show_progress=cfg.show_progress)
                self.report.cache = run["cache"]
                self.report.block_timings = run["block_timings"]
                self.report.quantization = run.get("quantization", {})
                self.collector.record_cache(run["cache"])
                self.collector.record_block_timings(run["block_timings"])
                section = {"source": "generated", "policy": policy.to_record(), "seconds": run["seconds"]}
            paths = save_frames(frames, self.frames_dir)

        height, width = frames[0][0].shape[:2]
        section.update(timesteps=len(frames), views=len(frames[0]), frame_size=[height, width],
                       files=len(paths))
        self.report.sections["generate"] = section
        return paths

    def run(self) -> RunReport:
        self.generate()
        return self.finish()
