# Package setup for subbary
from pathlib import Path

from setuptools import find_packages, setup

README = Path(__file__).parent / "README.md"

setup(
    name="subbary",
    version="0.3.0",
    description="Exact sub-barycenter inequalities for convex polytopes and the stability thresholds built on them",
    long_description=README.read_text(encoding="utf-8") if README.exists() else "",
    long_description_content_type="text/markdown",
    packages=find_packages(include=["subbary", "subbary.*"]),
    python_requires=">=3.8",
    install_requires=[
        "numpy>=1.25.2",
        "python-dotenv>=1.0.0",
    ],
    extras_require={
        "dashboard": ["streamlit>=1.28.1"],
        "test": ["pytest>=7.4", "hypothesis>=6.90", "scipy>=1.11"],
    },
    entry_points={
        "console_scripts": [
            "subbary=subbary.cli:main",
        ],
    },
)
