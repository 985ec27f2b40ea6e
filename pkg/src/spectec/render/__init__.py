"""Human-facing backends: LaTeX rules and prose pseudocode."""

from .latex import LatexDoc, RenderRefused, check_balanced, render_checked, render_latex
from .prose import ProseDoc, render_all, render_prose

__all__ = ["LatexDoc", "ProseDoc", "RenderRefused", "check_balanced", "render_all",
           "render_checked", "render_latex", "render_prose"]
