""" ellie setup file."""

# License: BSD 3 clause

from setuptools import setup


def readme():
    """
    Function to read the long description for the ellie package.
    """
    with open('README.md') as _file:
        return _file.read()


setup(name='ellie',
      version='0.1.0',
      description="ellie: Efficient Low-Light Image Enhancement",
      long_description=readme(),
      long_description_content_type='text/markdown',
      license='BSD',
      classifiers=[
          "Intended Audience :: Science/Research",
          "Natural Language :: English",
          "License :: OSI Approved :: BSD License",
          "Programming Language :: Python",
          "Programming Language :: Python :: 3",
          "Topic :: Scientific/Engineering",
          "Topic :: Scientific/Engineering :: Image Processing",
          "Topic :: Scientific/Engineering :: Artificial Intelligence",
          "Topic :: Software Development :: Libraries :: Python Modules"],
      packages=['ellie', 'ellie.decorators', 'ellie.colorspace', 'ellie.classical',
                'ellie.blocks', 'ellie.reparam', 'ellie.zoo', 'ellie.losses', 'ellie.metrics',
                'ellie.harness', 'ellie.harness.schedules', 'ellie.harness.runners'],
      install_requires=['numpy', 'scipy', 'scikit-learn', 'pandas', 'networkx', 'torch',
                        'Pillow', 'joblib'],
      extras_require={'test': ['opencv-python-headless']},
      entry_points={'console_scripts': ['ellie=ellie.cli:main']},
      python_requires='>=3.8',
      zip_safe=False)
