#!/usr/bin/env python
"""
Setup script for agnostic-dp.
"""

from setuptools import find_packages, setup

with open("README.md", "r", encoding="utf-8") as fh:
    long_description = fh.read()

setup(
    name="agnostic-dp",
    version="0.1.0",
    author="Your Name",
    author_email="your.email@example.com",
    description="Private agnostic learning by subsample-and-relabel, private prediction and Monte Carlo privacy audits",
    long_description=long_description,
    long_description_content_type="text/markdown",
    url="https://github.com/yourusername/agnostic-dp",
    package_dir={"": "src"},
    packages=find_packages(where="src"),
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Programming Language :: Python :: 3.12",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    python_requires=">=3.9",
    install_requires=[
        "python-dotenv>=1.0.0",
        "pydantic>=2.5.0",
        "cyclopts>=2.0.0",
        "numpy>=1.24",
        "scipy>=1.10",
    ],
    extras_require={
        "test": ["pytest>=7.4.0", "pytest-cov>=4.1.0", "pytest-mock>=3.12.0"],
        "dev": ["black", "isort", "flake8", "mypy"],
    },
    entry_points={"console_scripts": ["agnostic-dp=agnostic_dp.cli:main"]},
    package_data={
        "agnostic_dp": ["py.typed"],
    },
    include_package_data=True,
)
