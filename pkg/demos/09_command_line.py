"""
Command line
============

The ``simcomm`` entry point drives the same steps from files. This script
calls it in-process; from a shell drop the ``main([...])`` wrapper.
"""
import os
import tempfile

from simcomm.cli import main

d = tempfile.mkdtemp()
prefix = os.path.join(d, "bench")

# writes bench_edges.txt and bench_communities.txt
main(["generate", "--m", "2", "--nodes", "120", "--seed", "0", prefix])

main(["detect", prefix + "_edges.txt", "--detector", "leiden", "--out", os.path.join(d, "leiden.txt")])
main(["metrics", os.path.join(d, "leiden.txt"), prefix + "_communities.txt", "--edges", prefix + "_edges.txt"])

cfg = os.path.join(d, "run.ini")
with open(cfg, "w") as fh:
    fh.write("[run]\nmode = statistical_physics\nseeds = 0-1\n\n"
             "[learner]\nrf_trees = 20\nxgb_rounds = 20\n")
main(["pipeline", "--config", cfg, "--edges", prefix + "_edges.txt",
      "--communities", prefix + "_communities.txt", "--detector", "louvain",
      "--learner", "vc", "--out", os.path.join(d, "run")])
main(["report", os.path.join(d, "run"), "--out", os.path.join(d, "report")])
print(sorted(os.listdir(os.path.join(d, "report"))))
