from setuptools import setup, find_packages

with open("README.md") as fh:
    readme = fh.read()

with open("requirements.txt") as fh:
    requirements = [line.strip() for line in fh if line.strip() and not line.startswith('#')]

setup(name='pysocerr',
      version='0.1.0',
      description="Error analysis of Coulomb-counting battery state-of-charge estimation: closed-form predictors, "
                  "Monte-Carlo validation and a recursive SOC tracker.",
      long_description=readme,
      long_description_content_type='text/markdown',
      license='MIT',
      packages=find_packages(exclude=['scripts', 'examples', 'examples.*']),
      install_requires=[requirement for requirement in requirements
                        if not requirement.startswith(('pytest', 'hypothesis'))],
      extras_require={'test': [requirement for requirement in requirements
                               if requirement.startswith(('pytest', 'hypothesis'))]},
      entry_points={'console_scripts': ['pysocerr=pysocerr.cli:main']},
      python_requires='>=3.8',
      zip_safe=False
      )
